use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichlab_core::spacetime::*;

fn v(x0: f64, x1: f64, x2: f64) -> MinkowskiVector {
    MinkowskiVector::new(x0, x1, x2)
}

fn wedge() -> RegularDomain {
    RegularDomain::new(vec![
        LightlikePlane::new(v(1.0, 1.0, 0.0), 0.0).unwrap(),
        LightlikePlane::new(v(1.0, -1.0, 0.0), 0.0).unwrap(),
    ])
    .unwrap()
}

fn cone() -> RegularDomain {
    RegularDomain::new((0..4).map(|k| LightlikePlane::at_angle(k as f64 * FRAC_PI_2, 0.0)).collect()).unwrap()
}

fn skew() -> RegularDomain {
    RegularDomain::new(vec![
        LightlikePlane::at_angle(0.3, 0.5),
        LightlikePlane::at_angle(2.0, -0.2),
        LightlikePlane::at_angle(3.5, 0.1),
        LightlikePlane::at_angle(4.9, 0.7),
        LightlikePlane::at_angle(5.6, 0.0),
    ])
    .unwrap()
}

/// Largest Lorentzian distance from `p` to sampled points of the boundary:
/// a grid on every face, refined by golden-section search along each edge.
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
            // Along the line where planes i and j meet.
            let (li, lj) = (d.planes()[i].normal(), d.planes()[j].normal());
            let g = li.dot(lj);
            let r0 = (d.planes()[j].offset() / g) * li + (d.planes()[i].offset() / g) * lj;
            let mut dir = v(
                -(li.0[1] * lj.0[2] - li.0[2] * lj.0[1]),
                li.0[2] * lj.0[0] - li.0[0] * lj.0[2],
                li.0[0] * lj.0[1] - li.0[1] * lj.0[0],
            );
            dir = (1.0 / dir.q().sqrt()) * dir;
            let f = |s: f64| {
                let r = r0 + s * dir;
                if on_boundary(r) {
                    tau(r)
                } else {
                    0.0
                }
            };
            let (mut s_best, mut f_best) = (0.0, f(0.0));
            let steps = 4000;
            for k in 0..=steps {
                let s = -20.0 + 40.0 * k as f64 / steps as f64;
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
        // Coarse grid on the face of plane i.
        let l = d.planes()[i].normal();
        let e1 = v(l.0[0], l.0[1], l.0[2]);
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

#[test]
fn minkowski_basics() {
    assert_eq!(v(1.0, 0.0, 0.0).causal_type(), CausalType::Timelike);
    assert_eq!(v(1.0, 1.0, 0.0).causal_type(), CausalType::Lightlike);
    assert_eq!(v(0.0, 1.0, 0.0).causal_type(), CausalType::Spacelike);
    assert!(LightlikePlane::new(v(1.0, 0.5, 0.0), 0.0).is_err());
    assert!(LightlikePlane::new(v(-1.0, 1.0, 0.0), 0.0).is_err());
}

#[test]
fn building_domains() {
    let w = wedge();
    assert!(w.contains(v(1.0, 0.0, 0.0)));
    assert!(w.is_wedge());
    assert!(cone().contains(v(1.0, 0.0, 0.0)));
    let p = LightlikePlane::at_angle(0.0, 0.0);
    assert_eq!(RegularDomain::new(vec![p]).unwrap_err(), SpacetimeError::DegenerateFamily);
    let q = LightlikePlane::new(v(2.0, 2.0, 0.0), 1.0).unwrap();
    assert_eq!(RegularDomain::new(vec![p, q]).unwrap_err(), SpacetimeError::DegenerateFamily);
    let far = vec![LightlikePlane::at_angle(0.0, -1e12), LightlikePlane::at_angle(PI, -1e12)];
    assert_eq!(RegularDomain::new(far).unwrap_err(), SpacetimeError::EmptyDomain);
}

#[test]
fn wedge_time_is_the_distance_to_the_axis() {
    let d = wedge();
    for (t, z) in [(1.0, 0.0), (0.3, 5.0), (7.0, -2.0)] {
        let c = d.cosmological_time(v(t, 0.0, z)).unwrap();
        assert_eq!(c.time, t);
        assert_eq!(c.retraction_point, v(0.0, 0.0, z));
        assert_eq!(c.stratum, Stratum::Edge(0, 1));
    }
    let c = d.cosmological_time(v(2.0, 1.0, 0.0)).unwrap();
    assert!((c.time * c.time - 3.0).abs() < 1e-14);
    assert_eq!(d.cosmological_time(v(1.0, 2.0, 0.0)).unwrap_err(), SpacetimeError::OutsideDomain);
}

#[test]
fn witnesses_satisfy_their_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [wedge(), cone(), skew()] {
        for _ in 0..300 {
            let p = v(rng.random_range(0.0..6.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let Ok(c) = d.cosmological_time(p) else { continue };
            let r = c.retraction_point;
            assert!(d.planes().iter().all(|pl| pl.slack(r) > -1e-9));
            assert!(d.planes().iter().any(|pl| pl.slack(r).abs() < 1e-9));
            assert!((p - r).is_future_timelike());
            assert!((c.time * c.time + (p - r).q()).abs() < 1e-10);
        }
    }
}

#[test]
fn cone_time_matches_brute_force() {
    let d = cone();
    let c = d.cosmological_time(v(1.0, 0.0, 0.0)).unwrap();
    assert!((c.time - 1.0).abs() < 1e-15);
    assert!(c.retraction_point.0.iter().all(|x| x.abs() < 1e-15));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut n = 0;
    while n < 10 {
        let p = v(rng.random_range(0.5..4.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if !d.contains(p) {
            continue;
        }
        let t = d.cosmological_time(p).unwrap().time;
        let b = brute_force_time(&d, p);
        assert!((t - b).abs() < 1e-6, "{p:?}: {t} vs {b}");
        n += 1;
    }
}

#[test]
fn skew_time_matches_brute_force() {
    let d = skew();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut n = 0;
    while n < 5 {
        let p = v(rng.random_range(0.5..4.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if !d.contains(p) {
            continue;
        }
        let t = d.cosmological_time(p).unwrap().time;
        let b = brute_force_time(&d, p);
        assert!((t - b).abs() < 1e-6, "{p:?}: {t} vs {b}");
        n += 1;
    }
}

#[test]
fn time_grows_at_least_like_proper_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in [wedge(), cone(), skew()] {
        let mut n = 0;
        while n < 1000 {
            let p = v(rng.random_range(0.0..5.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let Ok(c) = d.cosmological_time(p) else { continue };
            let (eta, phi): (f64, f64) = (rng.random_range(0.0..2.0), rng.random_range(0.0..6.3));
            let u = v(eta.cosh(), eta.sinh() * phi.cos(), eta.sinh() * phi.sin());
            let t = rng.random_range(0.0..3.0);
            let later = d.cosmological_time(p + t * u).unwrap().time;
            assert!(later - c.time >= t - 1e-9);
            n += 1;
        }
    }
}

#[test]
fn concavity_on_reference_domains() {
    for d in [wedge(), cone(), skew()] {
        let r = d.check_concavity(10_000, 1);
        assert!(r.violations.is_empty(), "{:?}", &r.violations[..1]);
        assert!(r.min_slack > -CONCAVITY_TOL);
    }
    let d = cone();
    let p = v(2.0, 0.3, -0.4);
    let t = d.cosmological_time(p).unwrap().time;
    assert_eq!(d.cosmological_time(0.5 * (p + p)).unwrap().time - t, 0.0);
    let a = d.check_concavity(50, 7);
    assert_eq!(a, d.check_concavity(50, 7));
}

#[test]
fn level_sets_are_convex_from_the_future() {
    for d in [wedge(), cone(), skew()] {
        let pts = d.level_set_sample(1.0, 100).unwrap();
        assert!(pts.len() >= 90, "{}", pts.len());
        for p in &pts {
            assert!((d.cosmological_time(*p).unwrap().time - 1.0).abs() < 1e-8);
        }
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                for k in 1..10 {
                    let s = k as f64 / 10.0;
                    let x = (1.0 - s) * *p + s * *q;
                    assert!(d.cosmological_time(x).unwrap().time >= 1.0 - 1e-6);
                }
            }
        }
    }
}

#[test]
fn reparametrizations() {
    assert_eq!(cmc_reparam(Curvature::Flat, -2.0).unwrap(), 0.5);
    assert!((cmc_reparam(Curvature::DeSitter, -2.0).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
    assert!((cmc_reparam(Curvature::Flat, -1e-6).unwrap() - 1e6).abs() < 1e-9);
    assert!(cmc_reparam(Curvature::Flat, 0.0).is_err());
    assert!(cmc_reparam(Curvature::DeSitter, -1.0).is_err());
    for case in [Curvature::Flat, Curvature::DeSitter] {
        let mut last = 0.0;
        for k in 0..200 {
            let b = -50.0 + 0.245 * k as f64;
            let Ok(t) = cmc_reparam(case, b) else { continue };
            assert!(t > last);
            last = t;
        }
    }
}

#[test]
fn constants() {
    let f = comparison_constants(Curvature::Flat, 0.0).unwrap();
    assert_eq!((f.ratio_bound, f.bilip_k, f.bilip_power4), (2.0, 2.0, 16.0));
    assert!((f.teich_bound - 4.394_449_154_672_439).abs() < 1e-15);
    let d = comparison_constants(Curvature::DeSitter, 2.0).unwrap();
    assert!((d.bilip_k - 2.0 * 1f64.cosh()).abs() < 1e-15);
    assert!((comparison_constants(Curvature::DeSitter, 1e-9).unwrap().bilip_k - 2.0).abs() < 1e-15);
    assert!(comparison_constants(Curvature::DeSitter, 0.0).is_err());
}

#[test]
fn k_levels() {
    assert_eq!(k_level_for_cmc(-1.0).unwrap(), -1.0);
    assert!((k_level_for_cmc(-2.0).unwrap() - (-7.0 - 4.0 * 3f64.sqrt())).abs() < 1e-14);
    assert!(k_level_for_cmc(-0.5).is_err());
    let mut last = -1.0;
    for k in 1..=18 {
        let a = -1.0 - 0.5 * k as f64;
        let v = k_level_for_cmc(a).unwrap();
        assert!(v < last);
        last = v;
    }
}
