//! Regular domains in Minkowski space `R^{1,2}` cut out by finitely many
//! lightlike planes, and their cosmological time.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CAUSAL_TOL: f64 = 1e-12;

/// Constraint slack allowed when deciding that a point lies on the closure.
const ON_BOUNDARY: f64 = 1e-10;

/// The witness search doubles the time coordinate up to this value.
pub const WITNESS_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpacetimeError {
    #[error("normal of a lightlike plane must be future-pointing and null")]
    InvalidPlane,
    #[error("need at least two planes with pairwise independent normals")]
    DegenerateFamily,
    #[error("no point of the domain found with time coordinate below {WITNESS_BUDGET:e}")]
    EmptyDomain,
    #[error("point is not inside the domain")]
    OutsideDomain,
    #[error("no admissible point of the initial singularity in the past")]
    NoPastStratum,
    #[error("argument outside the domain of the formula")]
    DomainError,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkowskiVector(pub [f64; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalType {
    Timelike,
    Lightlike,
    Spacelike,
}

impl MinkowskiVector {
    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        MinkowskiVector([x0, x1, x2])
    }

    /// `<x, y> = -x0 y0 + x1 y1 + x2 y2`.
    pub fn dot(self, o: Self) -> f64 {
        let (x, y) = (self.0, o.0);
        -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
    }

    pub fn q(self) -> f64 {
        self.dot(self)
    }

    pub fn causal_type(self) -> CausalType {
        let q = self.q();
        if q < -CAUSAL_TOL {
            CausalType::Timelike
        } else if q > CAUSAL_TOL {
            CausalType::Spacelike
        } else {
            CausalType::Lightlike
        }
    }

    pub fn is_future_timelike(self) -> bool {
        self.0[0] > 0.0 && self.causal_type() == CausalType::Timelike
    }

    /// The vector `v` with `<v, x> = det(a, b, x)`; orthogonal to both.
    fn cross(a: Self, b: Self) -> Self {
        let (a, b) = (a.0, b.0);
        MinkowskiVector([
            -(a[1] * b[2] - a[2] * b[1]),
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

impl Add for MinkowskiVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        MinkowskiVector(core::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for MinkowskiVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        MinkowskiVector(core::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for MinkowskiVector {
    type Output = Self;
    fn neg(self) -> Self {
        MinkowskiVector(self.0.map(|x| -x))
    }
}

impl Mul<MinkowskiVector> for f64 {
    type Output = MinkowskiVector;
    fn mul(self, v: MinkowskiVector) -> MinkowskiVector {
        MinkowskiVector(v.0.map(|x| self * x))
    }
}

/// `{x : <x, normal> = offset}`; its future is `{<x, normal> < offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightlikePlane {
    normal: MinkowskiVector,
    offset: f64,
}

impl LightlikePlane {
    pub fn new(normal: MinkowskiVector, offset: f64) -> Result<Self, SpacetimeError> {
        let n = normal.0;
        let scale = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        if !(n[0] > 0.0) || !offset.is_finite() || normal.q().abs() > CAUSAL_TOL * scale {
            return Err(SpacetimeError::InvalidPlane);
        }
        Ok(LightlikePlane { normal, offset })
    }

    /// The plane with normal `(1, cos phi, sin phi)`.
    pub fn at_angle(phi: f64, offset: f64) -> Self {
        LightlikePlane {
            normal: MinkowskiVector::new(1.0, libm::cos(phi), libm::sin(phi)),
            offset,
        }
    }

    pub fn normal(&self) -> MinkowskiVector {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Positive exactly on the open future of the plane.
    pub fn slack(&self, x: MinkowskiVector) -> f64 {
        self.offset - x.dot(self.normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Edge(usize, usize),
    Vertex(usize, usize, usize),
}

/// The part of the line `point + s dir` (`dir` unit spacelike) where planes
/// `i` and `j` meet on the boundary, `s in [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub planes: (usize, usize),
    pub point: MinkowskiVector,
    pub dir: MinkowskiVector,
    pub lo: f64,
    pub hi: f64,
}

impl Edge {
    pub fn at(&self, s: f64) -> MinkowskiVector {
        self.point + s * self.dir
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularDomain {
    planes: Vec<LightlikePlane>,
    witness: MinkowskiVector,
    edges: Vec<Edge>,
    vertices: Vec<((usize, usize, usize), MinkowskiVector)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologicalValue {
    pub time: f64,
    pub retraction_point: MinkowskiVector,
    pub stratum: Stratum,
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if d.abs() <= 1e-12 * scale * scale * scale {
        return None;
    }
    Some(core::array::from_fn(|c| {
        let mut mc = m;
        for row in 0..3 {
            mc[row][c] = r[row];
        }
        det(mc) / d
    }))
}

impl RegularDomain {
    pub fn new(planes: Vec<LightlikePlane>) -> Result<Self, SpacetimeError> {
        let n = planes.len();
        if n < 2 {
            return Err(SpacetimeError::DegenerateFamily);
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (planes[i].normal, planes[j].normal);
                // Null vectors are proportional iff orthogonal.
                if a.dot(b).abs() <= 1e-12 * a.0[0] * b.0[0] {
                    return Err(SpacetimeError::DegenerateFamily);
                }
            }
        }
        let mut t = 1.0;
        let witness = loop {
            let x = MinkowskiVector::new(t, 0.0, 0.0);
            if planes.iter().all(|p| p.slack(x) > 0.0) {
                break MinkowskiVector::new(2.0 * t, 0.0, 0.0);
            }
            t *= 2.0;
            if t > WITNESS_BUDGET {
                return Err(SpacetimeError::EmptyDomain);
            }
        };
        let mut d = RegularDomain { planes, witness, edges: Vec::new(), vertices: Vec::new() };
        d.find_strata();
        Ok(d)
    }

    fn find_strata(&mut self) {
        let n = self.planes.len();
        for i in 0..n {
            for j in i + 1..n {
                let (pi, pj) = (self.planes[i], self.planes[j]);
                let (li, lj) = (pi.normal, pj.normal);
                let g = li.dot(lj);
                let point = (pj.offset / g) * li + (pi.offset / g) * lj;
                let c = MinkowskiVector::cross(li, lj);
                let dir = (1.0 / libm::sqrt(c.q())) * c;
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (k, p) in self.planes.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    // slack(point + s dir) = s0 - s * rate >= 0
                    let s0 = p.slack(point);
                    let rate = dir.dot(p.normal);
                    if rate.abs() < 1e-14 {
                        if s0 < -ON_BOUNDARY {
                            hi = f64::NEG_INFINITY;
                        }
                    } else if rate > 0.0 {
                        hi = hi.min(s0 / rate);
                    } else {
                        lo = lo.max(s0 / rate);
                    }
                }
                if lo <= hi {
                    self.edges.push(Edge { planes: (i, j), point, dir, lo, hi });
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ps = [self.planes[i], self.planes[j], self.planes[k]];
                    let m = ps.map(|p| {
                        let l = p.normal.0;
                        [-l[0], l[1], l[2]]
                    });
                    if let Some(x) = solve3(m, ps.map(|p| p.offset)) {
                        let x = MinkowskiVector(x);
                        if self.in_closure(x) {
                            self.vertices.push(((i, j, k), x));
                        }
                    }
                }
            }
        }
    }

    fn in_closure(&self, x: MinkowskiVector) -> bool {
        let scale = 1.0 + x.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.planes.iter().all(|p| p.slack(x) >= -ON_BOUNDARY * scale)
    }

    pub fn planes(&self) -> &[LightlikePlane] {
        &self.planes
    }

    pub fn witness(&self) -> MinkowskiVector {
        self.witness
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[((usize, usize, usize), MinkowskiVector)] {
        &self.vertices
    }

    /// Two planes meet along a single line; such domains have no vertex.
    pub fn is_wedge(&self) -> bool {
        self.planes.len() == 2
    }

    pub fn contains(&self, x: MinkowskiVector) -> bool {
        self.planes.iter().all(|p| p.slack(x) > 0.0)
    }

    /// Lorentzian distance from the initial singularity, with the point where
    /// it is attained.
    pub fn cosmological_time(&self, p: MinkowskiVector) -> Result<CosmologicalValue, SpacetimeError> {
        if !self.contains(p) {
            return Err(SpacetimeError::OutsideDomain);
        }
        let mut best: Option<CosmologicalValue> = None;
        let mut consider = |r: MinkowskiVector, stratum: Stratum| {
            let u = p - r;
            if !u.is_future_timelike() {
                return;
            }
            let time = libm::sqrt(-u.q());
            if best.map_or(true, |b| time > b.time) {
                best = Some(CosmologicalValue { time, retraction_point: r, stratum });
            }
        };
        for e in &self.edges {
            let s = (p - e.point).dot(e.dir);
            let tol = ON_BOUNDARY * (1.0 + s.abs());
            if s >= e.lo - tol && s <= e.hi + tol {
                consider(e.at(s), Stratum::Edge(e.planes.0, e.planes.1));
            }
        }
        for &((i, j, k), v) in &self.vertices {
            consider(v, Stratum::Vertex(i, j, k));
        }
        best.ok_or(SpacetimeError::NoPastStratum)
    }

    /// Time coordinate along the future ray `r + t u` from a boundary point.
    fn time_on_ray(&self, r: MinkowskiVector, u: MinkowskiVector, t: f64) -> f64 {
        self.cosmological_time(r + t * u).map_or(0.0, |c| c.time)
    }

    /// Points of the level set `T = a`, reached by bisection along future
    /// timelike rays from points of the singularity.
    pub fn level_set_sample(&self, a: f64, count: usize) -> Result<Vec<MinkowskiVector>, SpacetimeError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(SpacetimeError::DomainError);
        }
        let mut starts: Vec<MinkowskiVector> = self.vertices.iter().map(|v| v.1).collect();
        for e in &self.edges {
            let (lo, hi) = (e.lo.max(-2.0 * a), e.hi.min(2.0 * a));
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (e.lo, e.lo) };
            for s in [lo, 0.5 * (lo + hi), hi] {
                if s.is_finite() {
                    starts.push(e.at(s));
                }
            }
        }
        if starts.is_empty() {
            return Err(SpacetimeError::NoPastStratum);
        }
        const GOLDEN: f64 = 0.618_033_988_749_894_9;
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            let r = starts[k % starts.len()];
            let phi = core::f64::consts::TAU * libm::fmod(k as f64 * GOLDEN, 1.0);
            let eta = 1.2 * libm::fmod(k as f64 * GOLDEN * GOLDEN + 0.1, 1.0);
            let u = MinkowskiVector::new(
                libm::cosh(eta),
                libm::sinh(eta) * libm::cos(phi),
                libm::sinh(eta) * libm::sin(phi),
            );
            // T(r + t u) >= t, and T is increasing along the ray.
            let (mut lo, mut hi) = (0.0, a);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.time_on_ray(r, u, mid) < a {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * a {
                    break;
                }
            }
            let x = r + hi * u;
            let t = self.cosmological_time(x)?.time;
            if (t - a).abs() < 1e-8 {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Draws `samples` pairs of points of the domain near the witness and
    /// tests midpoint concavity of the cosmological time.
    pub fn check_concavity(&self, samples: usize, seed: u64) -> ConcavityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = self.witness;
        let half = 2.0 * w.0[0].max(1.0);
        let draw = |rng: &mut ChaCha8Rng| loop {
            let x = MinkowskiVector::new(
                w.0[0] + rng.random_range(-half..half),
                w.0[1] + rng.random_range(-half..half),
                w.0[2] + rng.random_range(-half..half),
            );
            if let Ok(c) = self.cosmological_time(x) {
                return (x, c.time);
            }
        };
        let mut report = ConcavityReport { samples, violations: Vec::new(), min_slack: f64::INFINITY };
        for _ in 0..samples {
            let (p, tp) = draw(&mut rng);
            let (q, tq) = draw(&mut rng);
            let m = 0.5 * (p + q);
            let tm = match self.cosmological_time(m) {
                Ok(c) => c.time,
                Err(_) => {
                    report.violations.push((p, q));
                    continue;
                }
            };
            let slack = tm - 0.5 * (tp + tq);
            report.min_slack = report.min_slack.min(slack);
            if slack < -CONCAVITY_TOL {
                report.violations.push((p, q));
            }
        }
        report
    }
}

pub const CONCAVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub samples: usize,
    /// Pairs whose midpoint falls below the chord by more than
    /// [`CONCAVITY_TOL`].
    pub violations: Vec<(MinkowskiVector, MinkowskiVector)>,
    /// Smallest `T((p+q)/2) - (T(p) + T(q))/2` seen.
    pub min_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Flat,
    DeSitter,
}

/// CMC time as a function of the mean curvature `b`: `-1/b` when flat,
/// `arcoth(-b)` in de Sitter space.
pub fn cmc_reparam(case: Curvature, b: f64) -> Result<f64, SpacetimeError> {
    match case {
        Curvature::Flat if b < 0.0 => Ok(-1.0 / b),
        Curvature::DeSitter if b < -1.0 => Ok(libm::atanh(-1.0 / b)),
        _ => Err(SpacetimeError::DomainError),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonConstants {
    /// Bound on `T_cmc / T_cos`.
    pub ratio_bound: f64,
    /// Bi-Lipschitz constant `K` of the level metrics.
    pub bilip_k: f64,
    pub bilip_power4: f64,
    /// Bound on the Teichmüller distance between CMC and cosmological levels.
    pub teich_bound: f64,
}

/// `K = 2` in the flat case and `2 cosh(a/2)` in de Sitter space.
pub fn comparison_constants(case: Curvature, a: f64) -> Result<ComparisonConstants, SpacetimeError> {
    let k = match case {
        Curvature::Flat => 2.0,
        Curvature::DeSitter if a > 0.0 => 2.0 * libm::cosh(0.5 * a),
        Curvature::DeSitter => return Err(SpacetimeError::DomainError),
    };
    Ok(ComparisonConstants {
        ratio_bound: 2.0,
        bilip_k: k,
        bilip_power4: k * k * k * k,
        teich_bound: 4.0 * libm::log(3.0),
    })
}

/// Curvature `k` of the constant-curvature level pushed to the future of the
/// CMC level of mean curvature `a <= -1`: `-2a^2 + 2a sqrt(a^2 - 1) + 1`.
pub fn k_level_for_cmc(a: f64) -> Result<f64, SpacetimeError> {
    if !(a <= -1.0) || !a.is_finite() {
        return Err(SpacetimeError::DomainError);
    }
    Ok(-2.0 * a * a + 2.0 * a * libm::sqrt(a * a - 1.0) + 1.0)
}
