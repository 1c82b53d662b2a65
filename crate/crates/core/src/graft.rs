//! Length behaviour along grafting rays over a multicurve supported on the
//! pants curves, and a synthetic family of structures that follows it.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::surface::{self, CurveClass, FnPoint, Holonomy, SurfaceError};
use crate::twist::{self, TwistError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraftError {
    #[error("lamination weights must be finite, non-negative and not all zero")]
    InvalidWeights,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("gamma{} carries no weight", .0 + 1)]
    ZeroWeight(usize),
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Twist(#[from] TwistError),
}

/// `sum c_i gamma_i` over the three pants curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplicialLamination {
    weights: [f64; 3],
}

impl SimplicialLamination {
    pub fn new(weights: [f64; 3]) -> Result<Self, GraftError> {
        if weights.iter().any(|c| !c.is_finite() || *c < 0.0) || weights.iter().all(|c| *c == 0.0) {
            return Err(GraftError::InvalidWeights);
        }
        Ok(SimplicialLamination { weights })
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().fold(0.0, |m, &c| m.max(c))
    }

    /// Indices of the curves with positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// `l_h(lambda)`.
    pub fn length(&self, p: &FnPoint) -> f64 {
        (0..3).map(|i| self.weights[i] * p.lengths[i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaySchedule {
    a_values: Vec<f64>,
    pub base: FnPoint,
    pub lamination: SimplicialLamination,
    /// Distance budget.
    pub k: f64,
    pub theta: f64,
}

pub const DEFAULT_THETA: f64 = 1.0;

impl RaySchedule {
    pub fn new(
        a_values: Vec<f64>,
        base: FnPoint,
        lamination: SimplicialLamination,
        k: f64,
        theta: f64,
    ) -> Result<Self, GraftError> {
        if a_values.is_empty() {
            return Err(GraftError::InvalidSchedule("no grafting parameters"));
        }
        if a_values.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(GraftError::InvalidSchedule("grafting parameters must be positive"));
        }
        if a_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GraftError::InvalidSchedule("grafting parameters must increase"));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(GraftError::InvalidSchedule("K must be non-negative"));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(GraftError::InvalidSchedule("theta must lie in (0, pi/2)"));
        }
        Ok(RaySchedule { a_values, base, lamination, k, theta })
    }

    /// `steps` values `a0 * ratio^j`.
    pub fn geometric(
        a0: f64,
        ratio: f64,
        steps: usize,
        base: FnPoint,
        lamination: SimplicialLamination,
        k: f64,
        theta: f64,
    ) -> Result<Self, GraftError> {
        let a = (0..steps).map(|j| a0 * libm::pow(ratio, j as f64)).collect();
        Self::new(a, base, lamination, k, theta)
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    /// Number of decades covered, `log10(a_last / a_first)`.
    pub fn decades(&self) -> f64 {
        libm::log10(self.a_values[self.a_values.len() - 1] / self.a_values[0])
    }
}

/// Lower and upper bounds on `l(gamma_i)` at grafting parameter `a` for any
/// structure within distance `k` of the grafting ray from `base`:
///
/// ```text
/// 2 e^{-2k} theta / (2 theta + c a) l(gamma_i)  <=  l_a(gamma_i)  <=  e^{2k} pi / (pi + c_i a) l(gamma_i)
/// ```
///
/// with `c` the largest weight.
pub fn pinching_bounds(
    base: &FnPoint,
    lam: &SimplicialLamination,
    k: f64,
    theta: f64,
    a: f64,
    i: usize,
) -> Result<(f64, f64), GraftError> {
    let ci = lam.weights[i];
    if ci == 0.0 {
        return Err(GraftError::ZeroWeight(i));
    }
    if !(a > 0.0) {
        return Err(GraftError::OutOfRange("a must be positive"));
    }
    let l = base.lengths[i];
    let c = lam.max_weight();
    let lower = 2.0 * libm::exp(-2.0 * k) * theta / (2.0 * theta + c * a) * l;
    let upper = libm::exp(2.0 * k) * (PI / (PI + ci * a) * l);
    Ok((lower, upper))
}

/// The structure at parameter `a`: grafted pants curves shrink exactly at the
/// upper pinching rate, everything else keeps its base value.
pub fn synthetic_curve(s: &RaySchedule, a: f64) -> FnPoint {
    let w = s.lamination.weights;
    let lengths = core::array::from_fn(|i| {
        let l = s.base.lengths[i];
        if w[i] > 0.0 {
            PI / (PI + w[i] * a) * l
        } else {
            l
        }
    });
    FnPoint { lengths, twists: s.base.twists }
}

/// Leading part of `l(beta)` near the end of a grafting ray:
/// `sum_j i(beta, gamma_j) (2 ln(1 / l(gamma_j)) + Tw(beta, gamma_j) l(gamma_j))`,
/// from lengths and twisting numbers measured on `h`.
pub fn asymptotic_length(h: &Holonomy, beta: &CurveClass, max_len: usize) -> Result<f64, GraftError> {
    let table = surface::curve_table();
    let mut sum = 0.0;
    for j in 0..3 {
        let n = beta.dt[j];
        if n == 0 {
            continue;
        }
        let g = &table[j];
        let l = surface::geodesic_length(h, g)?;
        let p = twist::twist_product(h, beta, g, max_len)?;
        sum += f64::from(n) * (2.0 * libm::log(1.0 / l) + p);
    }
    Ok(sum)
}

/// `e^{2k} l_base(lambda)`, a uniform bound for `l(lambda)` along the ray.
pub fn grafting_length_upper(base: &FnPoint, lam: &SimplicialLamination, k: f64) -> f64 {
    libm::exp(2.0 * k) * lam.length(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> FnPoint {
        FnPoint::new([2.0, 2.0, 2.0], [0.0; 3]).unwrap()
    }

    #[test]
    fn weights_are_validated() {
        assert!(SimplicialLamination::new([0.0; 3]).is_err());
        assert!(SimplicialLamination::new([1.0, -1.0, 0.0]).is_err());
        let l = SimplicialLamination::new([1.0, 2.0, 0.0]).unwrap();
        assert_eq!(l.support(), [0, 1]);
        assert_eq!(l.max_weight(), 2.0);
    }

    #[test]
    fn schedule_is_validated() {
        let lam = SimplicialLamination::new([1.0, 0.0, 0.0]).unwrap();
        assert!(RaySchedule::new(vec![1.0, 1.0], base(), lam, 0.0, 1.0).is_err());
        assert!(RaySchedule::new(vec![1.0], base(), lam, -1.0, 1.0).is_err());
        assert!(RaySchedule::new(vec![1.0], base(), lam, 0.0, 2.0).is_err());
        let s = RaySchedule::geometric(1e2, 10.0, 5, base(), lam, 0.0, 1.0).unwrap();
        assert!((s.decades() - 4.0).abs() < 1e-12);
    }
}
