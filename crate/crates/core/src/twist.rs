//! Twisting numbers of one closed geodesic about another.
//!
//! For every intersection point of `gamma` and `beta` one lift of `gamma`
//! crosses a fixed lift of `beta`; each contributes the displacement
//! `pr(a_r) - pr(a_l)` of its endpoints projected onto the axis. The
//! twisting number is the smallest modulus of these, in units of `l(beta)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::hyp2::{normalize_to_standard, BoundaryPoint, Hyp2Error};
use crate::lifts::Enumeration;
use crate::real::{ln_abs, Dd};
use crate::surface::{self, CurveClass, Holonomy, SurfaceError};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TwistError {
    #[error("`{gamma}` does not cross `{beta}`")]
    NoIntersection { gamma: String, beta: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl From<Hyp2Error> for TwistError {
    fn from(e: Hyp2Error) -> Self {
        TwistError::Surface(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistResult {
    /// `min |d| / l(beta)` over the displacements below.
    pub value: f64,
    pub witness_count: usize,
    /// `pr(a_r) - pr(a_l)` per intersection class, ordered by where the
    /// crossing sits along `beta`.
    pub per_class_displacements: Vec<f64>,
    pub beta_length: f64,
}

impl TwistResult {
    /// `l(beta) * Tw`, taken straight from the displacements.
    pub fn product(&self) -> f64 {
        min_modulus(&self.per_class_displacements)
    }
}

fn min_modulus(d: &[f64]) -> f64 {
    d.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
}

fn crossing_enumeration(
    h: &Holonomy,
    gamma: &CurveClass,
    beta: &CurveClass,
    max_len: usize,
) -> Result<Enumeration, TwistError> {
    if gamma.word.same_unoriented_class(&beta.word) {
        return Err(TwistError::NoIntersection {
            gamma: gamma.name.clone(),
            beta: beta.name.clone(),
        });
    }
    let b = h.eval(&beta.word);
    let en = surface::crossings_with(h, &b, core::slice::from_ref(gamma), max_len)?;
    if !en.is_stable(0) {
        return Err(SurfaceError::EnumerationInconclusive {
            curve: gamma.name.clone(),
            max_len,
            short: en.count_at(0, max_len.saturating_sub(1)),
            long: en.count_at(0, max_len),
        }
        .into());
    }
    if en.crossings[0].is_empty() {
        return Err(TwistError::NoIntersection {
            gamma: gamma.name.clone(),
            beta: beta.name.clone(),
        });
    }
    Ok(en)
}

/// `Tw_h(gamma, beta)` with lifts enumerated up to word length `max_len`.
/// The orientation of `beta` is that of its word.
pub fn twisting_number(
    h: &Holonomy,
    gamma: &CurveClass,
    beta: &CurveClass,
    max_len: usize,
) -> Result<TwistResult, TwistError> {
    let en = crossing_enumeration(h, gamma, beta, max_len)?;
    let d: Vec<f64> = en.crossings[0].iter().map(|c| c.displacement).collect();
    Ok(TwistResult {
        value: min_modulus(&d) / en.beta_length,
        witness_count: d.len(),
        per_class_displacements: d,
        beta_length: en.beta_length,
    })
}

/// `l_h(beta) * Tw_h(gamma, beta)`.
pub fn twist_product(
    h: &Holonomy,
    gamma: &CurveClass,
    beta: &CurveClass,
    max_len: usize,
) -> Result<f64, TwistError> {
    Ok(twisting_number(h, gamma, beta, max_len)?.product())
}

/// Left endpoints `a_l`, one per intersection class, after moving the axis of
/// `beta` to `(0, inf)` and the right endpoint of the crossing lift to 1.
///
/// This recomputes each crossing lift from its witness word and normalises it
/// directly, so `|ln(-a_l)|` gives an independent route to the displacements
/// of [`twisting_number`].
pub fn normalized_left_endpoints(
    h: &Holonomy,
    gamma: &CurveClass,
    beta: &CurveClass,
    max_len: usize,
) -> Result<Vec<Dd>, TwistError> {
    let en = crossing_enumeration(h, gamma, beta, max_len)?;
    let reps = surface::target_representatives(h, &gamma.word)?;
    let axis = h.eval(&beta.word).axis()?;
    let mut out = Vec::with_capacity(en.crossings[0].len());
    for c in &en.crossings[0] {
        let g = h.eval(&Word(
            c.witness
                .iter()
                .map(|&i| crate::word::Letter::ALL[i as usize])
                .collect(),
        ));
        let lift = reps[c.rep].1.image(&g);
        let (map, left) = match normalize_to_standard(&axis, lift.start) {
            Ok(m) => (m, lift.end),
            Err(Hyp2Error::WrongSide) => (normalize_to_standard(&axis, lift.end)?, lift.start),
            Err(e) => return Err(e.into()),
        };
        match map.apply(left) {
            BoundaryPoint::Finite(x) => out.push(x),
            BoundaryPoint::Infinity => return Err(Hyp2Error::DegenerateTriple.into()),
        }
    }
    Ok(out)
}

/// `l(beta) * Tw` in the normalised single-crossing configuration
/// `beta = (0, inf)`, `a_r = 1`.
pub fn product_from_left_endpoint(a_l: Dd) -> f64 {
    ln_abs(a_l).abs()
}

/// Arithmetic-geometric mean.
fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = libm::sqrt(a * b);
        a = m;
    }
    0.5 * (a + b)
}

/// Conformal modulus of the upper half-plane with vertices `-lambda, 0, 1,
/// inf`. Increasing in `lambda`.
///
/// The quadrilateral is the image of the one with vertices `-1/k, -1, 1, 1/k`
/// for `lambda = (1-k)^2 / (4k)`, which `sn` uniformises by a rectangle with
/// sides `2K(k)` and `K(k')`.
pub fn half_plane_modulus(lambda: f64) -> f64 {
    let r = libm::sqrt(lambda) * libm::sqrt(lambda + 1.0);
    let k = 1.0 / ((1.0 + 2.0 * lambda) + 2.0 * r);
    let one_minus_k = 2.0 * lambda / (r + lambda);
    let kp = libm::sqrt(one_minus_k * (1.0 + k));
    agm(1.0, kp) / (2.0 * agm(1.0, k))
}

fn modulus_inverse(m: f64) -> f64 {
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    if m >= half_plane_modulus(libm::exp(hi)) {
        return f64::INFINITY;
    }
    if m <= half_plane_modulus(libm::exp(lo)) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if half_plane_modulus(libm::exp(mid)) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    libm::exp(0.5 * (lo + hi))
}

/// A bound `M'` with `l(beta) Tw < M'` on every structure within Teichmüller
/// distance `k` of one where `l(beta) Tw < m`.
///
/// A `K`-quasiconformal map with `K = e^{2k}` fixes the normalised frame
/// `0, 1, inf` and moves `a_l = -lambda` so that the modulus of the
/// quadrilateral `(-lambda, 0, 1, inf)` changes by a factor of at most `K`.
/// The window is the extreme `|ln lambda'|` this allows for `|ln lambda| < m`.
pub fn twist_window(m: f64, k: f64) -> f64 {
    if k <= 0.0 {
        return m;
    }
    let kq = libm::exp(2.0 * k);
    let hi = modulus_inverse(kq * half_plane_modulus(libm::exp(m)));
    let lo = modulus_inverse(half_plane_modulus(libm::exp(-m)) / kq);
    libm::log(hi).max(-libm::log(lo)).max(m)
}
