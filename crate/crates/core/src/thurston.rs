//! Projective comparison of length vectors with intersection vectors on a
//! finite panel of curves.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graft::{self, GraftError, RaySchedule};
use crate::surface::{self, CurveClass, Holonomy, SurfaceError, DEFAULT_MAX_WORD};
use crate::twist;

pub const DEFAULT_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThurstonError {
    #[error("at a = {a:e}: {source}")]
    AtPoint { a: f64, source: GraftError },
    #[error("panel is missing `{0}`")]
    MissingCurve(String),
}

/// Values indexed by curve name, in panel order.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelVector {
    pub names: Vec<String>,
    pub entries: Vec<f64>,
}

impl PanelVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.entries[i])
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &x| m.max(x))
    }

    /// Divided by its largest entry; `None` without a positive entry.
    pub fn normalized(&self) -> Option<PanelVector> {
        let m = self.max();
        if !(m > 0.0) || !m.is_finite() {
            return None;
        }
        Some(PanelVector {
            names: self.names.clone(),
            entries: self.entries.iter().map(|x| x / m).collect(),
        })
    }
}

pub fn length_vector(h: &Holonomy, panel: &[CurveClass]) -> Result<PanelVector, SurfaceError> {
    Ok(PanelVector {
        names: panel.iter().map(|c| c.name.clone()).collect(),
        entries: panel
            .iter()
            .map(|c| surface::geodesic_length(h, c))
            .collect::<Result<_, _>>()?,
    })
}

/// `i(sum_{i in support} gamma_i, beta)` for every `beta` in the panel.
pub fn intersection_vector(support: &[usize], panel: &[CurveClass]) -> PanelVector {
    PanelVector {
        names: panel.iter().map(|c| c.name.clone()).collect(),
        entries: panel
            .iter()
            .map(|c| support.iter().map(|&i| f64::from(c.dt[i])).sum())
            .collect(),
    }
}

/// Sup distance between the max-normalised vectors; infinite when either
/// has no positive entry or the panels differ.
pub fn projective_error(v: &PanelVector, w: &PanelVector) -> f64 {
    if v.names != w.names {
        return f64::INFINITY;
    }
    match (v.normalized(), w.normalized()) {
        (Some(a), Some(b)) => a
            .entries
            .iter()
            .zip(&b.entries)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        _ => f64::INFINITY,
    }
}

/// Everything measured at one grafting parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub a: f64,
    pub lengths: PanelVector,
    pub normalized: PanelVector,
    /// `l(beta) / (2 ln a)`.
    pub scaled: Vec<f64>,
    pub error: f64,
    /// `(i, l(gamma_i) Tw(delta_i, gamma_i))` for each grafted `i`.
    pub twist_products: Vec<(usize, f64)>,
    /// `l(lambda)` for the schedule's weights.
    pub lamination_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub points: Vec<PointRecord>,
    pub target: PanelVector,
    pub tol: f64,
    pub verdict: bool,
    /// Why the verdict is false, if it is.
    pub diagnostic: Option<String>,
}

impl ConvergenceReport {
    pub fn a_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.a).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }
}

/// Measures the synthetic structure at `a`.
pub fn evaluate_point(s: &RaySchedule, panel: &[CurveClass], a: f64) -> Result<PointRecord, ThurstonError> {
    let at = |source: GraftError| ThurstonError::AtPoint { a, source };
    let p = graft::synthetic_curve(s, a);
    let h = surface::build_holonomy(&p).map_err(|e| at(e.into()))?;
    let lengths = length_vector(&h, panel).map_err(|e| at(e.into()))?;
    let support = s.lamination.support();
    let target = intersection_vector(&support, panel);
    let normalized = lengths
        .normalized()
        .ok_or_else(|| at(GraftError::OutOfRange("no positive length")))?;
    let two_ln_a = 2.0 * libm::log(a);
    let table = surface::curve_table();
    let mut twist_products = Vec::with_capacity(support.len());
    for &i in &support {
        let tp = twist::twist_product(&h, &table[3 + i], &table[i], DEFAULT_MAX_WORD)
            .map_err(|e| at(e.into()))?;
        twist_products.push((i, tp));
    }
    let lamination_length = (0..3)
        .map(|i| {
            let c = s.lamination.weights()[i];
            if c > 0.0 {
                surface::geodesic_length(&h, &table[i]).map(|l| c * l)
            } else {
                Ok(0.0)
            }
        })
        .sum::<Result<f64, _>>()
        .map_err(|e| at(e.into()))?;
    Ok(PointRecord {
        a,
        scaled: lengths.entries.iter().map(|l| l / two_ln_a).collect(),
        error: projective_error(&lengths, &target),
        normalized,
        lengths,
        twist_products,
        lamination_length,
    })
}

/// Puts per-point records (in any order) together and decides the verdict:
/// the last error is below `tol` and errors strictly decrease over the last
/// three decades of the schedule.
pub fn assemble_report(
    s: &RaySchedule,
    panel: &[CurveClass],
    tol: f64,
    mut points: Vec<PointRecord>,
) -> ConvergenceReport {
    points.sort_by(|x, y| x.a.total_cmp(&y.a));
    let target = intersection_vector(&s.lamination.support(), panel);
    let mut diagnostic = None;
    if points.len() < 2 || s.decades() < 3.0 - 1e-9 {
        diagnostic = Some(format!(
            "schedule spans {:.2} decades over {} points; need at least three decades",
            s.decades(),
            points.len()
        ));
    } else if let Some(p) = points.iter().find(|p| !p.error.is_finite()) {
        diagnostic = Some(format!("undefined projective error at a = {:e}", p.a));
    } else {
        let last = &points[points.len() - 1];
        let tail: Vec<&PointRecord> = points.iter().filter(|p| p.a >= last.a / 1e3 * (1.0 - 1e-12)).collect();
        if last.error >= tol {
            diagnostic = Some(format!("final error {:e} is not below {:e}", last.error, tol));
        } else if let Some(w) = tail.windows(2).find(|w| w[1].error >= w[0].error) {
            diagnostic = Some(format!(
                "error does not decrease from a = {:e} ({:e}) to a = {:e} ({:e})",
                w[0].a, w[0].error, w[1].a, w[1].error
            ));
        }
    }
    ConvergenceReport {
        points,
        target,
        tol,
        verdict: diagnostic.is_none(),
        diagnostic,
    }
}

pub fn run_convergence(s: &RaySchedule, panel: &[CurveClass], tol: f64) -> Result<ConvergenceReport, ThurstonError> {
    let support = s.lamination.support();
    for &i in &support {
        let name = &surface::curve_table()[3 + i].name;
        if !panel.iter().any(|c| &c.name == name) {
            return Err(ThurstonError::MissingCurve(name.clone()));
        }
    }
    let points = s
        .a_values()
        .iter()
        .map(|&a| evaluate_point(s, panel, a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_report(s, panel, tol, points))
}
