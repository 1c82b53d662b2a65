//! One line per acceptance criterion. Exits non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichlab_core::graft::*;
use teichlab_core::real::Dd;
use teichlab_core::spacetime::*;
use teichlab_core::surface::*;
use teichlab_core::thurston::{run_convergence, DEFAULT_TOL};
use teichlab_core::twist::{product_from_left_endpoint, twist_product, twisting_number};

const HOLONOMY_RESIDUAL: f64 = 1e-9;
const HOLONOMY_LENGTH_REL: f64 = 1e-6;
const HOLONOMY_BUDGET: Duration = Duration::from_secs(10);

const NORMALIZED_TOL: f64 = 1e-10;
const DEHN_SHIFT_TOL: f64 = 1e-8;

const SCALED_REL: f64 = 0.1;
const PROJECTIVE_TOL: f64 = DEFAULT_TOL;
const RAY_BUDGET: Duration = Duration::from_secs(60);

/// Measured pinched lengths may exceed the exact upper bound by rounding.
const CONTAINMENT_REL: f64 = 1e-9;

const WEDGE_TOL: f64 = 1e-12;
const CONE_AUDIT_TOL: f64 = 1e-6;
const CONCAVITY_SAMPLES: usize = 10_000;

/// A few ulps.
const ROUNDOFF: f64 = 4.0 * f64::EPSILON;

const BASE: [f64; 6] = [2.0, 3.0, 3.0, 0.3, -0.4, 0.1];
const WEIGHTS: [f64; 3] = [1.0, 2.0, 0.0];

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn holonomy(v: [f64; 6]) -> Holonomy {
    build_holonomy(&FnPoint::from_slice(&v).unwrap()).unwrap()
}

fn schedule(c: [f64; 3]) -> RaySchedule {
    RaySchedule::geometric(
        1e2,
        10f64.powf(0.25),
        17,
        FnPoint::from_slice(&BASE).unwrap(),
        SimplicialLamination::new(c).unwrap(),
        0.0,
        DEFAULT_THETA,
    )
    .unwrap()
}

fn holonomy_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_res, mut worst_len) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let l: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.5..4.0));
        let t: [f64; 3] = core::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let h = build_holonomy(&FnPoint::new(l, t).unwrap()).map_err(|e| e.to_string())?;
        worst_res = worst_res.max(h.relator_residual());
        for i in 0..3 {
            let got = h.eval(&pants_word(i)).translation_length().map_err(|e| e.to_string())?;
            worst_len = worst_len.max(((got - l[i]) / l[i]).abs());
        }
    }
    let dt = start.elapsed();
    check(worst_res < HOLONOMY_RESIDUAL, || format!("relator residual {worst_res:e}"))?;
    check(worst_len < HOLONOMY_LENGTH_REL, || format!("relative length error {worst_len:e}"))?;
    check(dt < HOLONOMY_BUDGET, || format!("took {dt:?}"))?;
    Ok(format!("residual {worst_res:.1e}, length error {worst_len:.1e}, {:.2} s", dt.as_secs_f64()))
}

fn twisting_fidelity() -> Outcome {
    let mut worst = 0.0f64;
    for k in [0.5f64, 1.0, 3.0, 7.25] {
        let p = product_from_left_endpoint(Dd::from(-k.exp()));
        worst = worst.max((p - k).abs());
    }
    check(worst < NORMALIZED_TOL, || format!("l Tw off |ln(-a_l)| by {worst:e}"))?;
    let t = curve_table();
    let g1 = find_curve(&t, "gamma1").unwrap();
    let mut shift_err = 0.0f64;
    for l in [1e-4, 1e-5] {
        for name in ["delta1", "delta1delta2"] {
            let c = find_curve(&t, name).unwrap();
            let before = twisting_number(&holonomy([l, 2.0, 2.0, 0.3, 0.0, 0.0]), c, g1, DEFAULT_MAX_WORD)
                .map_err(|e| e.to_string())?;
            let after = twisting_number(&holonomy([l, 2.0, 2.0, 0.3 + l, 0.0, 0.0]), c, g1, DEFAULT_MAX_WORD)
                .map_err(|e| e.to_string())?;
            check(before.per_class_displacements.len() == after.per_class_displacements.len(), || {
                format!("{name}: crossing count changed under the twist")
            })?;
            for (a, b) in after.per_class_displacements.iter().zip(&before.per_class_displacements) {
                shift_err = shift_err.max(((a - b).abs() - l).abs());
            }
        }
    }
    check(shift_err < DEHN_SHIFT_TOL, || format!("Dehn shift off by {shift_err:e}"))?;
    Ok(format!("normalized error {worst:.1e}, shift error {shift_err:.1e}"))
}

fn ray_reproduction() -> Outcome {
    let start = Instant::now();
    let panel = curve_table();
    let r = run_convergence(&schedule(WEIGHTS), &panel, PROJECTIVE_TOL).map_err(|e| e.to_string())?;
    let last = r.points.last().unwrap();
    check(last.a >= 1e6 * (1.0 - 1e-12), || format!("schedule ends at {:e}", last.a))?;
    let duals = ["delta1", "delta2", "delta3"];
    let idx: Vec<usize> = duals.iter().map(|n| panel.iter().position(|c| c.name == *n).unwrap()).collect();
    let scale = idx.iter().fold(0.0f64, |m, &j| m.max(r.target.entries[j]));
    for (&j, name) in idx.iter().zip(duals) {
        let (got, want) = (last.scaled[j], r.target.entries[j]);
        let allowed = if want > 0.0 { SCALED_REL * want } else { SCALED_REL * scale };
        check((got - want).abs() <= allowed, || format!("{name}: scaled {got} vs {want}"))?;
    }
    check(r.verdict, || r.diagnostic.clone().unwrap_or_default())?;
    let doubled = run_convergence(&schedule(WEIGHTS.map(|c| 2.0 * c)), &panel, PROJECTIVE_TOL).map_err(|e| e.to_string())?;
    check(doubled.target == r.target, || "doubling changed the target row".into())?;
    check(doubled.verdict == r.verdict, || "doubling changed the verdict".into())?;
    let dt = start.elapsed();
    check(dt < RAY_BUDGET, || format!("took {dt:?}"))?;
    let s: Vec<String> = idx.iter().map(|&j| format!("{:.3}", last.scaled[j])).collect();
    Ok(format!(
        "scaled duals [{}], final error {:.4}, {:.1} s",
        s.join(", "),
        last.error,
        dt.as_secs_f64()
    ))
}

fn containment() -> Outcome {
    let s = schedule(WEIGHTS);
    let t = curve_table();
    let support = s.lamination.support();
    let mut products = Vec::new();
    for &a in s.a_values() {
        let h = build_holonomy(&synthetic_curve(&s, a)).map_err(|e| e.to_string())?;
        let mut m = 0.0f64;
        for &i in &support {
            let l = geodesic_length(&h, &t[i]).map_err(|e| e.to_string())?;
            let (lo, up) = pinching_bounds(&s.base, &s.lamination, 0.0, 1.0, a, i).map_err(|e| e.to_string())?;
            check(lo <= l && l <= up * (1.0 + CONTAINMENT_REL), || {
                format!("gamma{} = {l} outside [{lo}, {up}] at a = {a:e}", i + 1)
            })?;
            m = m.max(twist_product(&h, &t[3 + i], &t[i], DEFAULT_MAX_WORD).map_err(|e| e.to_string())?);
        }
        products.push((a, m));
    }
    let last = products.last().unwrap().0;
    let tail: Vec<f64> = products.iter().filter(|p| p.0 >= last / 1e3 * (1.0 - 1e-12)).map(|p| p.1).collect();
    let growing = tail.windows(2).all(|w| w[1] > w[0]);
    check(!growing, || format!("twist products grow monotonically: {tail:?}"))?;
    let max = tail.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(format!("{} points inside, tail max l Tw {max:.4}", products.len()))
}

fn expansion() -> Outcome {
    let s = schedule(WEIGHTS);
    let t = curve_table();
    let last_a = *s.a_values().last().unwrap();
    let mut summary = Vec::new();
    for i in s.lamination.support() {
        let d = &t[3 + i];
        let mut diffs = Vec::new();
        for &a in s.a_values() {
            let h = build_holonomy(&synthetic_curve(&s, a)).map_err(|e| e.to_string())?;
            let asy = asymptotic_length(&h, d, DEFAULT_MAX_WORD).map_err(|e| e.to_string())?;
            let len = geodesic_length(&h, d).map_err(|e| e.to_string())?;
            diffs.push((a, (len - asy).abs()));
        }
        check(diffs.iter().all(|x| x.1.is_finite()), || format!("{}: non-finite difference", d.name))?;
        let max = diffs.iter().fold(0.0f64, |m, x| m.max(x.1));
        let min = diffs.iter().fold(f64::INFINITY, |m, x| m.min(x.1));
        let last_decade = diffs
            .iter()
            .filter(|x| x.0 >= last_a / 10.0 * (1.0 - 1e-12))
            .fold(0.0f64, |m, x| m.max(x.1));
        check(last_decade <= max, || format!("{}: last decade {last_decade} above {max}", d.name))?;
        summary.push(format!("{} in [{min:.3}, {max:.3}]", d.name));
    }
    Ok(summary.join(", "))
}

fn v(x0: f64, x1: f64, x2: f64) -> MinkowskiVector {
    MinkowskiVector::new(x0, x1, x2)
}

/// Largest Lorentzian distance from `p` to sampled boundary points: dense
/// sampling plus golden-section refinement along every edge line, and a grid
/// on every face.
fn brute_force_time(d: &RegularDomain, p: MinkowskiVector) -> f64 {
    let tau = |r: MinkowskiVector| {
        let u = p - r;
        if u.0[0] > 0.0 && u.q() < 0.0 {
            (-u.q()).sqrt()
        } else {
            0.0
        }
    };
    let on_boundary = |r: MinkowskiVector| d.planes().iter().all(|pl| pl.slack(r) >= -1e-9);
    let mut best = 0.0f64;
    let n = d.planes().len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (li, lj) = (d.planes()[i].normal(), d.planes()[j].normal());
            let g = li.dot(lj);
            let r0 = (d.planes()[j].offset() / g) * li + (d.planes()[i].offset() / g) * lj;
            let dir = v(
                -(li.0[1] * lj.0[2] - li.0[2] * lj.0[1]),
                li.0[2] * lj.0[0] - li.0[0] * lj.0[2],
                li.0[0] * lj.0[1] - li.0[1] * lj.0[0],
            );
            let dir = (1.0 / dir.q().sqrt()) * dir;
            let f = |s: f64| {
                let r = r0 + s * dir;
                if on_boundary(r) {
                    tau(r)
                } else {
                    0.0
                }
            };
            let (mut s_best, mut f_best) = (0.0, f(0.0));
            for k in 0..=4000 {
                let s = -20.0 + 40.0 * k as f64 / 4000.0;
                let y = f(s);
                if y > f_best {
                    (s_best, f_best) = (s, y);
                }
            }
            let (mut a, mut b) = (s_best - 0.01, s_best + 0.01);
            for _ in 0..200 {
                let m1 = a + 0.382 * (b - a);
                let m2 = a + 0.618 * (b - a);
                if f(m1) < f(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            best = best.max(f_best).max(f(0.5 * (a + b)));
        }
        let l = d.planes()[i].normal();
        let e1 = l;
        let e2 = v(0.0, -l.0[2], l.0[1]);
        let base = (d.planes()[i].offset() / -(l.0[0] * l.0[0])) * v(1.0, 0.0, 0.0);
        for a in -60..=60 {
            for b in -60..=60 {
                let r = base + (a as f64 / 10.0) * e1 + (b as f64 / 10.0) * e2;
                if on_boundary(r) {
                    best = best.max(tau(r));
                }
            }
        }
    }
    best
}

fn cosmological_time() -> Outcome {
    let wedge = RegularDomain::new(vec![
        LightlikePlane::new(v(1.0, 1.0, 0.0), 0.0).unwrap(),
        LightlikePlane::new(v(1.0, -1.0, 0.0), 0.0).unwrap(),
    ])
    .map_err(|e| e.to_string())?;
    let mut wedge_err = 0.0f64;
    for i in 1..=100 {
        for j in 0..10 {
            let (t, z) = (0.1 * i as f64, -4.5 + j as f64);
            let c = wedge.cosmological_time(v(t, 0.0, z)).map_err(|e| e.to_string())?;
            wedge_err = wedge_err.max((c.time - t).abs());
        }
    }
    check(wedge_err <= WEDGE_TOL, || format!("wedge error {wedge_err:e}"))?;

    let cone = RegularDomain::new(
        [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
            .iter()
            .map(|&(a, b)| LightlikePlane::new(v(1.0, a, b), 0.0).unwrap())
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut n, mut audit_err) = (0, 0.0f64);
    while n < 10 {
        let p = v(rng.random_range(0.5..4.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if !cone.contains(p) {
            continue;
        }
        let t = cone.cosmological_time(p).map_err(|e| e.to_string())?.time;
        audit_err = audit_err.max((t - brute_force_time(&cone, p)).abs());
        n += 1;
    }
    check(audit_err < CONE_AUDIT_TOL, || format!("cone audit error {audit_err:e}"))?;

    let report = cone.check_concavity(CONCAVITY_SAMPLES, 0);
    check(report.violations.is_empty(), || format!("{} concavity violations", report.violations.len()))?;
    Ok(format!(
        "wedge error {wedge_err:.1e}, cone audit {audit_err:.1e}, {CONCAVITY_SAMPLES} midpoints, min slack {:.1e}",
        report.min_slack
    ))
}

fn constants() -> Outcome {
    let close = |got: f64, want: f64, what: &str| {
        check((got - want).abs() <= ROUNDOFF * want.abs().max(1.0), || format!("{what}: {got} vs {want}"))
    };
    let e = |r: Result<f64, SpacetimeError>| r.map_err(|e| e.to_string());
    for b in [-0.5, -2.0, -10.0] {
        close(e(cmc_reparam(Curvature::Flat, b))?, -1.0 / b, "flat reparametrization")?;
    }
    for b in [-1.5, -2.0, -10.0] {
        // arcoth(x) = ln((x + 1) / (x - 1)) / 2
        let x = -b;
        close(e(cmc_reparam(Curvature::DeSitter, b))?, 0.5 * ((x + 1.0) / (x - 1.0)).ln(), "de Sitter reparametrization")?;
    }
    let flat = comparison_constants(Curvature::Flat, 0.0).map_err(|e| e.to_string())?;
    check(flat.ratio_bound == 2.0, || format!("ratio {}", flat.ratio_bound))?;
    close(flat.teich_bound, 4.0 * 3f64.ln(), "Teichmuller bound")?;
    for a in [0.5, 2.0, 5.0] {
        let c = comparison_constants(Curvature::DeSitter, a).map_err(|e| e.to_string())?;
        close(c.bilip_k, 2.0 * (a / 2.0).cosh(), "de Sitter K")?;
        close(c.bilip_power4, c.bilip_k.powi(4), "K^4")?;
    }
    for a in [-1.0f64, -2.0, -3.5] {
        let want = -2.0 * a * a + 2.0 * a * (a * a - 1.0).sqrt() + 1.0;
        close(e(k_level_for_cmc(a))?, want, "k level")?;
    }
    close(e(k_level_for_cmc(-2.0))?, -7.0 - 4.0 * 3f64.sqrt(), "k level at -2")?;
    Ok("all constants within a few ulps".into())
}

fn cli_outputs(dir: &Path, cmd: &str, cfg: &Path, threads: &str, files: &[&str]) -> Result<Vec<Vec<u8>>, String> {
    let out = dir.join(format!("{cmd}-{threads}-{}", dir.read_dir().map(|d| d.count()).unwrap_or(0)));
    let o = Command::new(env!("CARGO_BIN_EXE_teichlab"))
        .args([cmd, cfg.to_str().unwrap(), "--threads", threads, "--seed", "7", "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    check(o.status.success(), || format!("{cmd} exited with {:?}", o.status.code()))?;
    files.iter().map(|f| fs::read(out.join(f)).map_err(|e| e.to_string())).collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ex = |n: &str| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(n);
    let runs = [
        ("converge", ex("simplicial-12.cfg"), &["convergence.csv", "report.txt"][..]),
        ("spacetime", ex("cone.cfg"), &["cosmo.csv", "concavity.txt"][..]),
    ];
    for (cmd, cfg, files) in runs {
        let first = cli_outputs(dir.path(), cmd, &cfg, "1", files)?;
        for threads in ["1", "4"] {
            let again = cli_outputs(dir.path(), cmd, &cfg, threads, files)?;
            check(again == first, || format!("{cmd} output differs with {threads} thread(s)"))?;
        }
    }
    Ok("converge and spacetime byte-identical over 3 runs, 1 and 4 threads".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("holonomy soundness", holonomy_soundness),
        ("twisting fidelity", twisting_fidelity),
        ("grafting ray reproduction", ray_reproduction),
        ("pinching containment", containment),
        ("length expansion", expansion),
        ("cosmological time", cosmological_time),
        ("constants", constants),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
