use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichlab_core::graft::*;
use teichlab_core::surface::*;
use teichlab_core::twist::twist_product;

fn point(v: [f64; 6]) -> FnPoint {
    FnPoint::from_slice(&v).unwrap()
}

fn lam(c: [f64; 3]) -> SimplicialLamination {
    SimplicialLamination::new(c).unwrap()
}

fn schedule(base: [f64; 6], c: [f64; 3]) -> RaySchedule {
    RaySchedule::geometric(1e2, 10f64.powf(0.25), 17, point(base), lam(c), 0.0, DEFAULT_THETA).unwrap()
}

const BASE: [f64; 6] = [2.0, 3.0, 3.0, 0.3, -0.4, 0.1];

#[test]
fn bounds_at_simple_parameters() {
    let b = point([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    let (_, up) = pinching_bounds(&b, &lam([1.0; 3]), 0.0, FRAC_PI_2, PI, 0).unwrap();
    assert!((up - 0.5).abs() < 1e-15);
    let (lo, up) = pinching_bounds(&b, &lam([1.0; 3]), 0.0, 1.0, 1e-12, 0).unwrap();
    assert!((lo - 1.0).abs() < 1e-11 && (up - 1.0).abs() < 1e-11);
    assert_eq!(
        pinching_bounds(&b, &lam([1.0, 0.0, 0.0]), 0.0, 1.0, 1.0, 1).unwrap_err(),
        GraftError::ZeroWeight(1)
    );
    assert!(pinching_bounds(&b, &lam([1.0; 3]), 0.0, 1.0, 0.0, 0).is_err());
}

#[test]
fn lower_bound_never_exceeds_upper() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let c: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.01..5.0));
        let l: [f64; 3] = core::array::from_fn(|_| rng.random_range(0.1..5.0));
        let b = FnPoint::new(l, [0.0; 3]).unwrap();
        let k = rng.random_range(0.0..2.0);
        let theta = rng.random_range(1e-6..FRAC_PI_2);
        let a = rng.random_range(1e-9..1e6);
        for i in 0..3 {
            let (lo, up) = pinching_bounds(&b, &lam(c), k, theta, a, i).unwrap();
            assert!(lo <= up, "{c:?} {k} {theta} {a}");
        }
    }
}

#[test]
fn synthetic_lengths() {
    let s = schedule([2.0, 2.0, 2.0, 0.1, 0.2, 0.3], [1.0, 0.0, 0.0]);
    assert_eq!(synthetic_curve(&s, 0.0), s.base);
    let p = synthetic_curve(&s, PI);
    assert_eq!(p.lengths, [1.0, 2.0, 2.0]);
    assert_eq!(p.twists, s.base.twists);
}

#[test]
fn synthetic_points_sit_inside_the_bounds() {
    let s = schedule(BASE, [1.0, 2.0, 0.0]);
    for theta in [1.0, 0.1, 1.5] {
        for &a in s.a_values() {
            let p = synthetic_curve(&s, a);
            for i in [0, 1] {
                let (lo, up) = pinching_bounds(&s.base, &s.lamination, 0.0, theta, a, i).unwrap();
                assert!(lo <= p.lengths[i]);
                assert_eq!(p.lengths[i], up);
            }
            assert_eq!(p.lengths[2], BASE[2]);
        }
    }
}

#[test]
fn pinching_rate() {
    // The rate is 1 - ln(pi l_base / c_i) / ln a up to O(1/a).
    let s = schedule([0.3, 0.6, 2.0, 0.3, -0.4, 0.1], [1.0, 2.0, 0.0]);
    let a = 1e6;
    let p = synthetic_curve(&s, a);
    for i in [0, 1] {
        let rate = (1.0 / p.lengths[i]).ln() / a.ln();
        assert!((rate - 1.0).abs() < 0.02, "gamma{}: {rate}", i + 1);
    }
    let s = schedule(BASE, [1.0, 2.0, 0.0]);
    let p = synthetic_curve(&s, a);
    for (i, c) in [(0, 1.0), (1, 2.0)] {
        let rate = (1.0 / p.lengths[i]).ln() / a.ln();
        let predicted = 1.0 - (PI * BASE[i] / c).ln() / a.ln();
        assert!((rate - predicted).abs() < 1e-5);
    }
}

#[test]
fn length_bound_along_the_ray() {
    let b = point([2.0, 2.0, 2.0, 0.0, 0.0, 0.0]);
    let l = lam([1.0, 2.0, 0.0]);
    assert_eq!(grafting_length_upper(&b, &l, 0.0), 6.0);
    assert!(grafting_length_upper(&b, &l, 0.5) > grafting_length_upper(&b, &l, 0.1));
    let s = schedule(BASE, [1.0, 2.0, 0.0]);
    let h = build_holonomy(&synthetic_curve(&s, 1e4)).unwrap();
    let t = curve_table();
    let measured: f64 = (0..2).map(|i| [1.0, 2.0][i] * geodesic_length(&h, &t[i]).unwrap()).sum();
    assert!(measured <= grafting_length_upper(&s.base, &s.lamination, 0.0));
}

#[test]
fn expansion_of_disjoint_curves_is_empty() {
    let s = schedule(BASE, [1.0, 0.0, 0.0]);
    let h = build_holonomy(&synthetic_curve(&s, 1e3)).unwrap();
    let t = curve_table();
    assert_eq!(asymptotic_length(&h, &t[0], DEFAULT_MAX_WORD).unwrap(), 0.0);
}

#[test]
fn expansion_tracks_the_length() {
    let s = schedule(BASE, [1.0, 0.0, 0.0]);
    let t = curve_table();
    let d1 = find_curve(&t, "delta1").unwrap();
    let mut diffs = Vec::new();
    for &a in s.a_values() {
        let h = build_holonomy(&synthetic_curve(&s, a)).unwrap();
        let asy = asymptotic_length(&h, d1, DEFAULT_MAX_WORD).unwrap();
        diffs.push(geodesic_length(&h, d1).unwrap() - asy);
        let lead = 4.0 * (1.0 / synthetic_curve(&s, a).lengths[0]).ln();
        if a >= 1e5 {
            assert!((asy / lead - 1.0).abs() < 0.05, "{a}");
        }
    }
    let (lo, hi) = diffs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), d| (l.min(*d), h.max(*d)));
    assert!(hi - lo < 0.01, "{diffs:?}");
}

#[test]
fn twisting_stays_bounded() {
    let s = schedule(BASE, [1.0, 2.0, 0.0]);
    let t = curve_table();
    for i in [0, 1] {
        let p: Vec<f64> = s
            .a_values()
            .iter()
            .map(|&a| {
                let h = build_holonomy(&synthetic_curve(&s, a)).unwrap();
                twist_product(&h, &t[3 + i], &t[i], DEFAULT_MAX_WORD).unwrap()
            })
            .collect();
        let tail = &p[p.len() - 13..];
        assert!(tail.windows(2).any(|w| w[1] <= w[0]), "gamma{}: {p:?}", i + 1);
        assert!(p.iter().all(|x| *x < 1.0));
    }
}
