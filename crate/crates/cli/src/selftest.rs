//! Invariant checks over every module at default sizes.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichlab_core::graft::{pinching_bounds, synthetic_curve, RaySchedule, SimplicialLamination, DEFAULT_THETA};
use teichlab_core::hyp2::MoebiusMap;
use teichlab_core::real::Dd;
use teichlab_core::spacetime::*;
use teichlab_core::surface::*;
use teichlab_core::thurston::{projective_error, PanelVector};
use teichlab_core::twist::{product_from_left_endpoint, twisting_number};
use teichlab_core::word::Word;

use crate::run::par_map;

pub struct Ctx<'a> {
    pub table: &'a [CurveClass],
    pub seed: u64,
}

type Check = fn(&Ctx) -> Result<(), String>;

pub struct Outcome {
    pub name: &'static str,
    pub result: Result<(), String>,
}

const CHECKS: &[(&str, Check)] = &[
    ("hyp2: inverse and translation length", hyp2_maps),
    ("surface: holonomy of random points", random_holonomy),
    ("surface: curve words are cyclically reduced", reduced_words),
    ("surface: lengths ignore rotation and inversion", rotation_invariance),
    ("surface: intersection numbers match the table", intersection_table),
    ("twist: normalized configuration", normalized_configuration),
    ("twist: full Dehn twist shifts by the length", dehn_shift),
    ("twist: gamma word rotation does not matter", gamma_rotation),
    ("graft: pinching bounds are ordered", bounds_ordered),
    ("graft: synthetic points inside the bounds", synthetic_inside),
    ("thurston: projective error is scale free", scale_free),
    ("spacetime: wedge closed form", wedge_closed_form),
    ("spacetime: concavity on the cone domain", cone_concavity),
    ("spacetime: comparison constants", constants),
];

pub fn run(table: &[CurveClass], seed: u64, threads: usize) -> Vec<Outcome> {
    let ctx = Ctx { table, seed };
    par_map(CHECKS, threads, |(name, f)| Outcome { name, result: f(&ctx) })
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn curve<'a>(ctx: &'a Ctx, name: &str) -> Result<&'a CurveClass, String> {
    find_curve(ctx.table, name).map_err(|e| e.to_string())
}

fn holonomy(v: [f64; 6]) -> Result<Holonomy, String> {
    let p = FnPoint::from_slice(&v).map_err(|e| e.to_string())?;
    build_holonomy(&p).map_err(|e| e.to_string())
}

fn hyp2_maps(ctx: &Ctx) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..1000 {
        let (a, b, c): (f64, f64, f64) = (rng.random_range(0.5..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let m = MoebiusMap::new(a, b, c, (1.0 + b * c) / a).map_err(|e| e.to_string())?;
        let e = (m * m.inverse()).distance_projective(&MoebiusMap::identity());
        ensure(e < 1e-12, || format!("m m^-1 off identity by {e:e}"))?;
        let tr = m.trace().hi().abs();
        if tr > 2.0 + 1e-6 {
            let l = m.translation_length().map_err(|e| e.to_string())?;
            let want = 2.0 * (tr / 2.0).acosh();
            ensure((l - want).abs() < 1e-9 * want.max(1.0), || format!("length {l} vs {want}"))?;
        }
    }
    Ok(())
}

fn random_holonomy(ctx: &Ctx) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..100 {
        let l: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.5..4.0));
        let t: [f64; 3] = core::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let h = holonomy([l[0], l[1], l[2], t[0], t[1], t[2]])?;
        let r = h.relator_residual();
        ensure(r < 1e-9, || format!("relator residual {r:e} at {l:?} {t:?}"))?;
        for i in 0..3 {
            let got = h.eval(&pants_word(i)).translation_length().map_err(|e| e.to_string())?;
            ensure(((got - l[i]) / l[i]).abs() < 1e-6, || format!("gamma{} = {got}, want {}", i + 1, l[i]))?;
        }
    }
    Ok(())
}

fn reduced_words(ctx: &Ctx) -> Result<(), String> {
    for c in ctx.table {
        ensure(!c.word.is_empty() && c.word == c.word.cyclically_reduced(), || format!("{} = {}", c.name, c.word))?;
    }
    Ok(())
}

fn rotation_invariance(ctx: &Ctx) -> Result<(), String> {
    let h = holonomy([1.0, 1.5, 2.5, 0.3, -0.7, 1.1])?;
    for c in ctx.table {
        let base = geodesic_length(&h, c).map_err(|e| e.to_string())?;
        let words = rotations(&c.word).into_iter().chain([c.word.inverse()]);
        for w in words {
            let l = h.eval(&w).translation_length().map_err(|e| e.to_string())?;
            ensure((l - base).abs() < 1e-10, || format!("{} as {w}: {l} vs {base}", c.name))?;
        }
    }
    Ok(())
}

fn intersection_table(ctx: &Ctx) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let l: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.5..4.0));
    let t: [f64; 3] = core::array::from_fn(|_| rng.random_range(-2.0..2.0));
    for v in [[l[0], l[1], l[2], t[0], t[1], t[2]], [1e-3, 2.0, 2.0, 0.3, 0.0, 0.0]] {
        let h = holonomy(v)?;
        for i in 0..3 {
            let n = geometric_intersections(&h, ctx.table, i, DEFAULT_MAX_WORD).map_err(|e| e.to_string())?;
            for (c, k) in ctx.table.iter().zip(n) {
                ensure(k == c.dt[i], || format!("i({}, gamma{}) = {k}, table says {} at {v:?}", c.name, i + 1, c.dt[i]))?;
            }
        }
    }
    Ok(())
}

fn normalized_configuration(_: &Ctx) -> Result<(), String> {
    let p = product_from_left_endpoint(Dd::from(-(3f64.exp())));
    ensure((p - 3.0).abs() < 1e-10, || format!("l Tw = {p}"))
}

fn dehn_shift(ctx: &Ctx) -> Result<(), String> {
    let (d1, g1) = (curve(ctx, "delta1")?, curve(ctx, "gamma1")?);
    let l = 1e-4;
    let at = |t: f64| {
        let h = holonomy([l, 2.0, 2.0, t, 0.0, 0.0])?;
        twisting_number(&h, d1, g1, DEFAULT_MAX_WORD).map_err(|e| e.to_string())
    };
    let (before, after) = (at(0.3)?, at(0.3 + l)?);
    ensure(before.per_class_displacements.len() == after.per_class_displacements.len(), || "crossing count changed".into())?;
    for (a, b) in after.per_class_displacements.iter().zip(&before.per_class_displacements) {
        let s = a - b;
        ensure(((s.abs() - l) / l).abs() < 1e-4, || format!("shift {s:e}, want {l:e}"))?;
    }
    Ok(())
}

fn gamma_rotation(ctx: &Ctx) -> Result<(), String> {
    let h = holonomy([1.0, 1.5, 2.5, 0.3, -0.7, 1.1])?;
    let (d1, g1) = (curve(ctx, "delta1")?, curve(ctx, "gamma1")?);
    let base = twisting_number(&h, d1, g1, DEFAULT_MAX_WORD).map_err(|e| e.to_string())?.value;
    for w in rotations(&g1.word) {
        let g = CurveClass { name: g1.name.clone(), word: w.clone(), dt: g1.dt };
        let v = twisting_number(&h, d1, &g, DEFAULT_MAX_WORD).map_err(|e| e.to_string())?.value;
        ensure((v - base).abs() < 1e-9, || format!("gamma1 as {w}: {v} vs {base}"))?;
    }
    Ok(())
}

fn bounds_ordered(ctx: &Ctx) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..1000 {
        let c: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.01..5.0));
        let l: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.1..5.0));
        let b = FnPoint::new(l, [0.0; 3]).map_err(|e| e.to_string())?;
        let lam = SimplicialLamination::new(c).map_err(|e| e.to_string())?;
        let (k, theta, a) = (rng.random_range(0.0..2.0), rng.random_range(1e-6..FRAC_PI_2), rng.random_range(1e-9..1e6));
        for i in 0..3 {
            let (lo, up) = pinching_bounds(&b, &lam, k, theta, a, i).map_err(|e| e.to_string())?;
            ensure(lo <= up, || format!("{lo} > {up} at c = {c:?}, a = {a}"))?;
        }
    }
    Ok(())
}

fn synthetic_inside(_: &Ctx) -> Result<(), String> {
    let base = FnPoint::from_slice(&[2.0, 3.0, 3.0, 0.3, -0.4, 0.1]).map_err(|e| e.to_string())?;
    let lam = SimplicialLamination::new([1.0, 2.0, 0.0]).map_err(|e| e.to_string())?;
    let s = RaySchedule::geometric(1e2, 10f64.powf(0.25), 17, base, lam, 0.0, DEFAULT_THETA).map_err(|e| e.to_string())?;
    for &a in s.a_values() {
        let p = synthetic_curve(&s, a);
        for i in [0, 1] {
            let (lo, up) = pinching_bounds(&s.base, &lam, 0.0, DEFAULT_THETA, a, i).map_err(|e| e.to_string())?;
            ensure(lo <= p.lengths[i] && p.lengths[i] <= up, || format!("gamma{} at a = {a:e}", i + 1))?;
        }
    }
    Ok(())
}

fn scale_free(ctx: &Ctx) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let names: Vec<String> = (0..8).map(|i| i.to_string()).collect();
    for _ in 0..100 {
        let e: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..10.0)).collect();
        let s = rng.random_range(0.1..100.0);
        let v = PanelVector { names: names.clone(), entries: e.clone() };
        let w = PanelVector { names: names.clone(), entries: e.iter().map(|x| s * x).collect() };
        let d = projective_error(&v, &w);
        ensure(d < 1e-14, || format!("distance {d:e} after scaling by {s}"))?;
    }
    Ok(())
}

fn wedge_closed_form(_: &Ctx) -> Result<(), String> {
    let planes = [(1.0, 1.0), (1.0, -1.0)]
        .map(|(a, b)| LightlikePlane::new(MinkowskiVector::new(a, b, 0.0), 0.0).expect("null normal"));
    let d = RegularDomain::new(planes.to_vec()).map_err(|e| e.to_string())?;
    for i in 1..=100 {
        for j in -5..=5 {
            let (t, z) = (0.05 * i as f64, j as f64);
            let c = d.cosmological_time(MinkowskiVector::new(t, 0.0, z)).map_err(|e| e.to_string())?;
            ensure((c.time - t).abs() <= 1e-12, || format!("T({t}, 0, {z}) = {}", c.time))?;
        }
    }
    Ok(())
}

fn cone_concavity(ctx: &Ctx) -> Result<(), String> {
    let planes = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        .map(|(a, b)| LightlikePlane::new(MinkowskiVector::new(1.0, a, b), 0.0).expect("null normal"));
    let d = RegularDomain::new(planes.to_vec()).map_err(|e| e.to_string())?;
    let r = d.check_concavity(10_000, ctx.seed);
    ensure(r.violations.is_empty(), || format!("{} violations, min slack {:e}", r.violations.len(), r.min_slack))
}

fn constants(_: &Ctx) -> Result<(), String> {
    let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0);
    let flat = cmc_reparam(Curvature::Flat, -2.0).map_err(|e| e.to_string())?;
    ensure(close(flat, 0.5), || format!("flat reparametrization {flat}"))?;
    let ds = cmc_reparam(Curvature::DeSitter, -2.0).map_err(|e| e.to_string())?;
    ensure(close(ds, 0.5 * 3f64.ln()), || format!("de Sitter reparametrization {ds}"))?;
    let c = comparison_constants(Curvature::DeSitter, 2.0).map_err(|e| e.to_string())?;
    ensure(c.ratio_bound == 2.0 && close(c.bilip_k, 2.0 * 1f64.cosh()) && close(c.teich_bound, 4.0 * 3f64.ln()), || {
        format!("{c:?}")
    })?;
    let k = k_level_for_cmc(-2.0).map_err(|e| e.to_string())?;
    ensure(close(k, -7.0 - 4.0 * 3f64.sqrt()), || format!("k level {k}"))
}

/// Swaps the intersection rows of two table entries; used to exercise the
/// failure path.
pub fn corrupted_table() -> Vec<CurveClass> {
    let mut t = curve_table();
    t[3].dt = [0, 2, 0];
    t[4].dt = [2, 0, 0];
    t[7].word = Word::parse("a1 B1 A1").expect("well formed");
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_table_fails_the_table_checks() {
        let t = corrupted_table();
        let ctx = Ctx { table: &t, seed: 1 };
        assert!(reduced_words(&ctx).unwrap_err().contains("sigma12"));
        assert!(constants(&ctx).is_ok());
    }
}
