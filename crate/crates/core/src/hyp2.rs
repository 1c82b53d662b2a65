//! Möbius maps of the upper half-plane and oriented geodesics.
//!
//! Matrices are stored in double-double with determinant one. The point at
//! infinity is a tagged variant, never a large float.

use core::fmt;
use core::ops::Mul;

use crate::real::{dd, ln_abs, to_f64, Dd};

/// A map counts as hyperbolic when `tr^2 - 4` exceeds this. It corresponds to
/// translation lengths of about `1e-12`, far below the shortest curves the
/// grafting schedules produce.
pub const HYPERBOLIC_DISC_MIN: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum Hyp2Error {
    #[error("map is not hyperbolic (tr^2 - 4 = {0:e})")]
    NonHyperbolic(f64),
    #[error("degenerate configuration of boundary points")]
    DegenerateTriple,
    #[error("point lies to the left of the oriented geodesic")]
    WrongSide,
    #[error("matrix has non-positive determinant")]
    SingularMatrix,
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
}

#[derive(Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(Dd),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(x: f64) -> Self {
        BoundaryPoint::Finite(dd(x))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Finite(x) => Some(to_f64(x)),
            BoundaryPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{:e}", to_f64(*x)),
            BoundaryPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Element of PSL(2,R), represented by an SL(2,R) matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub(crate) a: Dd,
    pub(crate) b: Dd,
    pub(crate) c: Dd,
    pub(crate) d: Dd,
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries_f64();
        write!(f, "[[{a:e}, {b:e}], [{c:e}, {d:e}]]")
    }
}

impl MoebiusMap {
    /// Builds a map from any real matrix with positive determinant, rescaling
    /// it to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Hyp2Error> {
        Self::from_dd(dd(a), dd(b), dd(c), dd(d))
    }

    pub fn from_dd(a: Dd, b: Dd, c: Dd, d: Dd) -> Result<Self, Hyp2Error> {
        let det = a * d - b * c;
        if !(det.hi() > 0.0) {
            return Err(Hyp2Error::SingularMatrix);
        }
        let s = det.sqrt();
        Ok(MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    /// Caller guarantees `ad - bc = 1`.
    pub(crate) const fn raw(a: Dd, b: Dd, c: Dd, d: Dd) -> Self {
        MoebiusMap { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(dd(1.0), dd(0.0), dd(0.0), dd(1.0))
    }

    /// Translation by `t` along the geodesic from 0 to infinity.
    pub fn dilation(t: f64) -> Self {
        let e = dd(libm::exp(t / 2.0));
        Self::raw(e, dd(0.0), dd(0.0), dd(1.0) / e)
    }

    pub fn entries(&self) -> [Dd; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn entries_f64(&self) -> [f64; 4] {
        [to_f64(self.a), to_f64(self.b), to_f64(self.c), to_f64(self.d)]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries_f64()
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Self) -> Self {
        Self::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn trace(&self) -> Dd {
        self.a + self.d
    }

    pub fn determinant(&self) -> Dd {
        self.a * self.d - self.b * self.c
    }

    /// `tr^2 - 4`, evaluated as `(a-d)^2 + 4bc` to avoid cancellation near
    /// parabolic elements.
    pub fn discriminant(&self) -> Dd {
        let t = self.a - self.d;
        t * t + dd(4.0) * self.b * self.c
    }

    pub fn apply(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == dd(0.0) {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == dd(0.0) {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.discriminant().hi() > HYPERBOLIC_DISC_MIN
    }

    pub fn translation_length(&self) -> Result<f64, Hyp2Error> {
        translation_length(self)
    }

    pub fn axis(&self) -> Result<OrientedGeodesic, Hyp2Error> {
        axis(self)
    }

    /// Distance between the identity and `self` in sup-norm of entries, up to
    /// the sign ambiguity of PSL(2,R).
    pub fn distance_projective(&self, o: &Self) -> f64 {
        let p = self.entries();
        let q = o.entries();
        let plus = (0..4).fold(0.0f64, |m, i| m.max(to_f64(p[i] - q[i]).abs()));
        let minus = (0..4).fold(0.0f64, |m, i| m.max(to_f64(p[i] + q[i]).abs()));
        plus.min(minus)
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, rhs: MoebiusMap) -> MoebiusMap {
        self.compose(&rhs)
    }
}

impl<'a> Mul<&'a MoebiusMap> for &'a MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, rhs: &MoebiusMap) -> MoebiusMap {
        self.compose(rhs)
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct OrientedGeodesic {
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
}

impl OrientedGeodesic {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self, Hyp2Error> {
        if start == end {
            return Err(Hyp2Error::DegenerateGeodesic);
        }
        Ok(OrientedGeodesic { start, end })
    }

    pub fn reversed(&self) -> Self {
        OrientedGeodesic {
            start: self.end,
            end: self.start,
        }
    }

    /// Image under `m`.
    pub fn image(&self, m: &MoebiusMap) -> Self {
        OrientedGeodesic {
            start: m.apply(self.start),
            end: m.apply(self.end),
        }
    }

    /// Map sending `start` to 0 and `end` to infinity. Points to the right of
    /// the geodesic go to the positive reals.
    pub fn standard_frame(&self) -> MoebiusMap {
        match (self.start, self.end) {
            (BoundaryPoint::Finite(u), BoundaryPoint::Infinity) => {
                MoebiusMap::raw(dd(1.0), -u, dd(0.0), dd(1.0))
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(v)) => {
                MoebiusMap::raw(dd(0.0), dd(-1.0), dd(1.0), -v)
            }
            (BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)) => {
                let w = u - v;
                let s = if w.hi() < 0.0 { -w } else { w };
                MoebiusMap::raw(dd(1.0) / s, -u / s, w / s, -(w * v) / s)
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => MoebiusMap::identity(),
        }
    }

    /// Orientation-reversing reflection across the geodesic, as a matrix of
    /// determinant -1 acting by `z -> (a conj(z) + b)/(c conj(z) + d)`.
    pub fn reflection(&self) -> [Dd; 4] {
        let f = self.standard_frame();
        let fi = f.inverse();
        // f^{-1} diag(1,-1) f
        let m = [fi.a, -fi.b, fi.c, -fi.d];
        [
            m[0] * f.a + m[1] * f.c,
            m[0] * f.b + m[1] * f.d,
            m[2] * f.a + m[3] * f.c,
            m[2] * f.b + m[3] * f.d,
        ]
    }
}

pub fn translation_length(g: &MoebiusMap) -> Result<f64, Hyp2Error> {
    let disc = g.discriminant();
    if !(disc.hi() > HYPERBOLIC_DISC_MIN) {
        return Err(Hyp2Error::NonHyperbolic(disc.hi()));
    }
    Ok(2.0 * libm::asinh(to_f64(disc.sqrt()) / 2.0))
}

/// Oriented from the repelling to the attracting fixed point.
pub fn axis(g: &MoebiusMap) -> Result<OrientedGeodesic, Hyp2Error> {
    let disc = g.discriminant();
    if !(disc.hi() > HYPERBOLIC_DISC_MIN) {
        return Err(Hyp2Error::NonHyperbolic(disc.hi()));
    }
    let r = disc.sqrt();
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    if c == dd(0.0) {
        let fin = BoundaryPoint::Finite(b / (d - a));
        // x -> a^2 x + ab: infinity attracts iff |a| > 1.
        return Ok(if a.hi().abs() > d.hi().abs() {
            OrientedGeodesic { start: fin, end: BoundaryPoint::Infinity }
        } else {
            OrientedGeodesic { start: BoundaryPoint::Infinity, end: fin }
        });
    }
    let amd = a - d;
    let sigma = if amd.hi() < 0.0 { -1.0 } else { 1.0 };
    let q = (amd + r * dd(sigma)) / dd(2.0);
    let x1 = q / c;
    let x2 = -b / q;
    // Eigenvalues c x + d are (tr +- sigma r)/2; the larger one marks the
    // attracting point.
    let tr = g.trace();
    let x1_attracts = (sigma > 0.0) == (tr.hi() > 0.0);
    let (p1, p2) = (BoundaryPoint::Finite(x1), BoundaryPoint::Finite(x2));
    Ok(if x1_attracts {
        OrientedGeodesic { start: p2, end: p1 }
    } else {
        OrientedGeodesic { start: p1, end: p2 }
    })
}

/// Signed arclength coordinate of the orthogonal projection of `p` onto `g`,
/// measured from the foot of the standard frame.
pub fn project_to_axis(g: &OrientedGeodesic, p: BoundaryPoint) -> Result<f64, Hyp2Error> {
    match g.standard_frame().apply(p) {
        BoundaryPoint::Finite(x) if x != dd(0.0) => Ok(ln_abs(x)),
        _ => Err(Hyp2Error::DegenerateTriple),
    }
}

/// The unique map sending `g` to `(0, inf)` and `right_point` to 1.
pub fn normalize_to_standard(
    g: &OrientedGeodesic,
    right_point: BoundaryPoint,
) -> Result<MoebiusMap, Hyp2Error> {
    let f = g.standard_frame();
    let y = match f.apply(right_point) {
        BoundaryPoint::Finite(y) if y != dd(0.0) => y,
        _ => return Err(Hyp2Error::DegenerateTriple),
    };
    if y.hi() < 0.0 {
        return Err(Hyp2Error::WrongSide);
    }
    let s = y.sqrt();
    Ok(MoebiusMap::raw(dd(1.0) / s, dd(0.0), dd(0.0), s).compose(&f))
}

/// Distance between two geodesics with disjoint closures, from the trace of
/// the product of the reflections across them.
pub fn distance_between(g: &OrientedGeodesic, h: &OrientedGeodesic) -> f64 {
    let r = g.reflection();
    let s = h.reflection();
    let tr = r[0] * s[0] + r[1] * s[2] + r[2] * s[1] + r[3] * s[3];
    let half = to_f64(tr).abs() / 2.0;
    libm::acosh(half.max(1.0))
}
