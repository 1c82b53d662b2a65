//! Enumeration of lifts of closed geodesics that cross a fixed axis.
//!
//! Words in the generators are walked depth-first up to a maximum length.
//! For every node `g` and target curve `c`, the lift `g . axis(c)` is tested
//! against `axis(beta)` after normalising the latter to `(0, inf)`. Crossing
//! lifts are identified modulo `<beta>` by reducing their crossing parameter
//! into one period.

use alloc::vec;
use alloc::vec::Vec;

use crate::hyp2::{BoundaryPoint, Hyp2Error, MoebiusMap, OrientedGeodesic};
use crate::real::{dd, ln_abs, Dd};

/// A word is not extended once the product of the operator norms of its
/// letters (and of the normalising frame) exceeds this. The absolute rounding
/// error of a double-double product is bounded by about `1e-32` times that
/// product, so lifts reached within the budget have endpoints good to
/// roughly `1e-16` relative to the word's own size.
pub const NORM_BUDGET: f64 = 1e16;

/// Endpoints closer than this (multiplicatively) to 0 or infinity in the
/// normalised frame are treated as asymptotic to `axis(beta)`, not crossing.
const ASYMPTOTIC: f64 = 1e25;

/// Relative tolerance, in units of `l(beta)`, for identifying two crossings
/// as the same `<beta>`-orbit.
pub const DEDUP_REL: f64 = 1e-9;

/// Crossings whose estimated relative endpoint error exceeds this fraction
/// of `min(l(beta), 1)` are not recorded.
pub const MAX_REL_ERR: f64 = 1e-6;

/// Largest separation, in units of `l(beta)`, at which a lift dropped for
/// precision is still taken to repeat a recorded orbit.
pub const ROUGH_MATCH: f64 = 1e-3;

/// A dropped lift far from every recorded orbit becomes one if its
/// parameter error times this is within `ROUGH_MATCH * l(beta)`.
const PROMOTE: f64 = 8.0;

/// Absolute floor for the same identification. Crossing parameters of one
/// orbit reached through different words agree to about `1e-14`.
pub const DEDUP_ABS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Crossing point along `axis(beta)`, reduced into `[0, l(beta))`.
    pub param: f64,
    /// `pr(a_r) - pr(a_l)` for the endpoints on the right and left of
    /// `axis(beta)`.
    pub displacement: f64,
    /// Length of the shortest word reaching this orbit.
    pub word_len: usize,
    /// That word, as letter indices.
    pub witness: Vec<u8>,
    /// Which conjugate representative of the target it moves.
    pub rep: usize,
    /// Bound on the rounding error in `param`.
    pub param_err: f64,
    /// The right and left endpoints as positive reals in the normalised
    /// frame, moved by `beta` so that `param` is their log-midpoint.
    pub ends: [Dd; 2],
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub beta_length: f64,
    pub max_len: usize,
    /// One list of crossing orbits per target, sorted by `param`.
    pub crossings: Vec<Vec<Crossing>>,
    pub nodes: u64,
    pub pruned: u64,
    /// Crossing lifts dropped because rounding could move their crossing
    /// parameter by more than `MAX_REL_ERR * min(l(beta), 1)`.
    pub unresolved: u64,
    /// Per target, dropped lifts that could not be matched to a recorded
    /// orbit. Any of them may be a missed intersection.
    pub unexplained: Vec<usize>,
}

impl Enumeration {
    /// Orbit count using words of length at most `len`.
    pub fn count_at(&self, target: usize, len: usize) -> usize {
        self.crossings[target]
            .iter()
            .filter(|c| c.word_len <= len)
            .count()
    }

    pub fn is_stable(&self, target: usize) -> bool {
        self.unexplained[target] == 0
            && (self.max_len == 0
                || self.count_at(target, self.max_len - 1) == self.count_at(target, self.max_len))
    }
}

type M = [Dd; 4];

#[inline(always)]
fn mul(p: &M, q: &M) -> M {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

fn inf_norm(m: &M) -> f64 {
    (m[0].hi().abs() + m[1].hi().abs()).max(m[2].hi().abs() + m[3].hi().abs())
}

/// Homogeneous coordinates with max-norm 1.
fn homogeneous(p: BoundaryPoint) -> [Dd; 2] {
    match p {
        BoundaryPoint::Finite(x) if x.hi().abs() > 1.0 => [dd(1.0), dd(1.0) / x],
        BoundaryPoint::Finite(x) => [x, dd(1.0)],
        BoundaryPoint::Infinity => [dd(1.0), dd(0.0)],
    }
}

fn powi(mut x: Dd, mut n: u64) -> Dd {
    let mut acc = dd(1.0);
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * x;
        }
        x = x * x;
        n >>= 1;
    }
    acc
}

struct Target {
    start: [Dd; 2],
    end: [Dd; 2],
    start_f: [f64; 2],
    end_f: [f64; 2],
    /// Endpoints as pseudo-angles on `RP^1`.
    arc: [f64; 2],
    /// Bound on the displacement of either endpoint (as a unit homogeneous
    /// vector) caused by rounding in the target matrix.
    slack: f64,
    /// Index of the curve this representative belongs to.
    curve: usize,
    rep: usize,
}

/// Position of the homogeneous point `(x, y)` on `RP^1`, as a pseudo-angle
/// in `[0, 2)`. Increasing in the true angle with derivative in `[1/2, 1]`
/// per radian, so angular margins carry over unchanged.
#[inline(always)]
fn angle(x: f64, y: f64) -> f64 {
    let (x, y) = if y < 0.0 || (y == 0.0 && x < 0.0) { (-x, -y) } else { (x, y) };
    let a = 1.0 - x / (x.abs() + y);
    if a >= PERIOD {
        0.0
    } else {
        a
    }
}

#[inline(always)]
fn ccw(from: f64, to: f64) -> f64 {
    let d = to - from;
    if d < 0.0 {
        d + PERIOD
    } else {
        d
    }
}

#[inline(always)]
fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(PERIOD - d)
}

const PERIOD: f64 = 2.0;

/// A crossing lift whose endpoints are not known well enough to record.
struct Dropped {
    curve: usize,
    rep: usize,
    depth: usize,
    path: Vec<u8>,
    param: f64,
    err: f64,
    /// The right and left endpoints as positive reals in the normalised
    /// frame, with their relative errors.
    ends: [(Dd, f64); 2],
}

/// `|ln q|` after moving `q` by the nearest power of the multiplier
/// `e^l`, less the rounding that power can carry; the ratio of two points
/// that agree up to `beta` gives 0.
fn period_gap(q: Dd, mult: Dd, l: f64) -> f64 {
    let lq = ln_abs(q);
    let j = libm::round(lq / l);
    if !(j.abs() < 1e15) {
        return f64::INFINITY;
    }
    let m = powi(mult, j.abs() as u64);
    let q = if j > 0.0 { q / m } else { q * m };
    (libm::fabs(ln_abs(q.abs())) - 1e-31 * (1.0 + j.abs())).max(0.0)
}

fn mod_dist(a: f64, b: f64, l: f64) -> f64 {
    let d = (a - b) - l * libm::floor((a - b) / l);
    d.min(l - d)
}

struct Ctx<'a> {
    letters: &'a [M; 8],
    letters_f: [[f64; 4]; 8],
    frame: M,
    norms: [f64; 8],
    targets: Vec<Target>,
    beta_len: f64,
    /// Multiplier of `beta` in the normalised frame, `e^{l(beta)}`.
    mult: Dd,
    tol: f64,
    out: Vec<Vec<Crossing>>,
    nodes: u64,
    pruned: u64,
    unresolved: u64,
    dropped: Vec<Dropped>,
    path: Vec<u8>,
}

#[inline(always)]
fn mul_f(p: &[f64; 4], q: &[f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

impl Ctx<'_> {
    /// The lift `g . A` crosses `(0, inf)` iff `A` separates `g^-1(0)` from
    /// `g^-1(inf)`. Decided here in `f64` with a margin covering the
    /// accumulated rounding of `g`; only candidates get the exact test.
    fn test(&mut self, gf: &[f64; 4], bound: f64, depth: usize) {
        let (u, v) = ([-gf[1], gf[0]], [gf[3], -gf[2]]);
        let e = 2e-14 * bound;
        // |x| + |y| >= hypot(x, y) / sqrt(2)
        let du = 1.5 * e / (u[0].abs() + u[1].abs()) + 1e-13;
        let dv = 1.5 * e / (v[0].abs() + v[1].abs()) + 1e-13;
        let (pu, pv) = (angle(u[0], u[1]), angle(v[0], v[1]));
        let mut g: Option<M> = None;
        for ti in 0..self.targets.len() {
            let t = &self.targets[ti];
            let [s, f] = t.arc;
            let near = circ_dist(pu, s) < du
                || circ_dist(pu, f) < du
                || circ_dist(pv, s) < dv
                || circ_dist(pv, f) < dv;
            if !near {
                let w = ccw(s, f);
                if (ccw(s, pu) < w) == (ccw(s, pv) < w) {
                    continue;
                }
            }
            let g = *g.get_or_insert_with(|| {
                self.path
                    .iter()
                    .fold(self.frame, |acc, &li| mul(&acc, &self.letters[li as usize]))
            });
            self.exact(&g, ti, bound, depth);
        }
    }

    fn exact(&mut self, g: &M, ti: usize, bound: f64, depth: usize) {
        let t = &self.targets[ti];
        let n1 = g[0] * t.start[0] + g[1] * t.start[1];
        let d1 = g[2] * t.start[0] + g[3] * t.start[1];
        let n2 = g[0] * t.end[0] + g[1] * t.end[1];
        let d2 = g[2] * t.end[0] + g[3] * t.end[1];
        let s1 = (n1.hi() > 0.0) == (d1.hi() > 0.0);
        let s2 = (n2.hi() > 0.0) == (d2.hi() > 0.0);
        if s1 == s2 || n1.hi() == 0.0 || n2.hi() == 0.0 || d1.hi() == 0.0 || d2.hi() == 0.0 {
            return;
        }
        // Relative error of each endpoint: the entries of g carry an
        // absolute error of about 1e-32 * bound.
        let e = 1e-32 * bound;
        let r1 = e * (t.start_f[0].abs() + t.start_f[1].abs()) * (1.0 / n1.hi().abs() + 1.0 / d1.hi().abs());
        let r2 = e * (t.end_f[0].abs() + t.end_f[1].abs()) * (1.0 / n2.hi().abs() + 1.0 / d2.hi().abs());
        let r1 = r1 + t.slack / (n1.hi().abs() * d1.hi().abs());
        let r2 = r2 + t.slack / (n2.hi().abs() * d2.hi().abs());
        let err = r1 + r2;
        let x1 = n1 / d1;
        let x2 = n2 / d2;
        if err > MAX_REL_ERR * self.beta_len.min(1.0) {
            self.unresolved += 1;
            let l = self.beta_len;
            let p = 0.5 * (ln_abs(x1) + ln_abs(x2));
            let (e1, e2) = ((x1.abs(), r1), (x2.abs(), r2));
            self.dropped.push(Dropped {
                curve: t.curve,
                rep: t.rep,
                depth,
                path: self.path.clone(),
                param: p - l * libm::floor(p / l),
                err,
                ends: if s1 { [e1, e2] } else { [e2, e1] },
            });
            return;
        }
        let far = |x: Dd| {
            let a = x.hi().abs();
            !(a > 1.0 / ASYMPTOTIC && a < ASYMPTOTIC)
        };
        if far(x1) || far(x2) {
            return;
        }
        let (right, left) = if s1 { (x1, -x2) } else { (x2, -x1) };
        let (curve, rep) = (t.curve, t.rep);
        self.record(curve, rep, right, left, depth, err);
    }
    fn record(&mut self, ti: usize, rep: usize, right: Dd, left: Dd, depth: usize, err: f64) {
        let l = self.beta_len;
        let p0 = 0.5 * (ln_abs(right) + ln_abs(left));
        let k = libm::floor(p0 / l);
        let (right, left) = if k != 0.0 {
            let s = powi(self.mult, k.abs() as u64);
            if k > 0.0 {
                (right / s, left / s)
            } else {
                (right * s, left * s)
            }
        } else {
            (right, left)
        };
        let (lr, ll) = (ln_abs(right), ln_abs(left));
        let mut param = 0.5 * (lr + ll);
        param -= l * libm::floor(param / l);
        let displacement = lr - ll;
        let list = &mut self.out[ti];
        let tol = (self.tol * l).max(DEDUP_ABS).max(4.0 * err);
        for c in list.iter_mut() {
            let mut d = (c.param - param).abs();
            d = d.min(l - d);
            if d <= tol {
                if depth < c.word_len {
                    c.word_len = depth;
                    c.witness = self.path.clone();
                    c.rep = rep;
                }
                return;
            }
        }
        list.push(Crossing {
            param,
            displacement,
            word_len: depth,
            witness: self.path.clone(),
            rep,
            param_err: err,
            ends: [right.abs(), left.abs()],
        });
    }

    fn walk(&mut self, g: &[f64; 4], bound: f64, last: Option<usize>, depth: usize, max_len: usize) {
        self.nodes += 1;
        self.test(g, bound, depth);
        if depth == max_len {
            return;
        }
        for li in 0..8 {
            if last == Some(li ^ 1) {
                continue;
            }
            let b = bound * self.norms[li];
            if b > NORM_BUDGET {
                self.pruned += 1;
                continue;
            }
            let h = mul_f(g, &self.letters_f[li]);
            self.path.push(li as u8);
            self.walk(&h, b, Some(li), depth + 1, max_len);
            self.path.pop();
        }
    }
}

/// The axis of one conjugate representative of a target curve, with a bound
/// on the rounding error in its endpoints, as an angle on `RP^1`.
#[derive(Debug, Clone, Copy)]
pub struct TargetRep {
    pub axis: OrientedGeodesic,
    pub endpoint_err: f64,
}

/// Enumerates crossing orbits of lifts of every target curve across the axis
/// of `beta`. Each target is given by one or more conjugate representatives
/// (typically its cyclic rotations); their crossings are pooled. `letters`
/// holds the eight generator matrices in [`crate::word`] order.
pub fn enumerate(
    letters: &[MoebiusMap; 8],
    beta: &MoebiusMap,
    targets: &[Vec<TargetRep>],
    max_len: usize,
) -> Result<Enumeration, Hyp2Error> {
    let ax = beta.axis()?;
    let beta_len = beta.translation_length()?;
    let frame = ax.standard_frame();
    let conj = beta.conjugate_by(&frame);
    let k = if conj.a.hi().abs() > conj.d.hi().abs() { conj.a / conj.d } else { conj.d / conj.a };
    let mult = k.abs();
    let mut tgt = Vec::with_capacity(targets.len());
    for (curve, reps) in targets.iter().enumerate() {
        for (rep, t) in reps.iter().enumerate() {
            let a = t.axis;
            let slack = 4.0 * t.endpoint_err;
            let (start, end) = (homogeneous(a.start), homogeneous(a.end));
            tgt.push(Target {
                arc: [
                    angle(start[0].hi(), start[1].hi()),
                    angle(end[0].hi(), end[1].hi()),
                ],
                slack,
                start_f: [start[0].hi(), start[1].hi()],
                end_f: [end[0].hi(), end[1].hi()],
                start,
                end,
                curve,
                rep,
            });
        }
    }
    let mats: [M; 8] = core::array::from_fn(|i| letters[i].entries());
    let f = frame.entries();
    let mut ctx = Ctx {
        letters: &mats,
        letters_f: core::array::from_fn(|i| letters[i].entries_f64()),
        frame: f,
        norms: core::array::from_fn(|i| inf_norm(&mats[i])),
        targets: tgt,
        beta_len,
        mult,
        tol: DEDUP_REL,
        out: vec![Vec::new(); targets.len()],
        nodes: 0,
        pruned: 0,
        unresolved: 0,
        dropped: Vec::new(),
        path: Vec::with_capacity(max_len),
    };
    let ff = frame.entries_f64();
    ctx.walk(&ff, inf_norm(&f), None, 0, max_len);
    for list in ctx.out.iter_mut() {
        list.sort_by(|a, b| a.param.total_cmp(&b.param));
    }
    // A dropped lift repeats a recorded orbit if its rough crossing
    // parameter lands within `ROUGH_MATCH * l(beta)` of it. One that matches
    // nothing but is located to within `1 / PROMOTE` of that is a new orbit.
    // Failing both, a lift with one endpoint known well repeats an orbit
    // whose lift has that same endpoint up to `beta`, with the other endpoint
    // consistent within its error: distinct lifts of a closed geodesic share
    // no endpoints. Distinct lifts running through a thin collar together
    // can have endpoints within `1e-15` of each other, so that comparison is
    // done in full precision. Anything else may be a missed intersection.
    let mut unexplained = vec![0; targets.len()];
    let cap = ROUGH_MATCH * beta_len;
    let mut dropped = core::mem::take(&mut ctx.dropped);
    dropped.sort_by(|a, b| a.err.total_cmp(&b.err));
    let mut rest = Vec::new();
    for d in dropped {
        let list = &mut ctx.out[d.curve];
        let hit = list
            .iter()
            .position(|c| d.param.is_finite() && mod_dist(c.param, d.param, beta_len) <= cap);
        if let Some(i) = hit {
            let c = &mut list[i];
            if d.depth < c.word_len {
                c.word_len = d.depth;
                c.witness = d.path;
                c.rep = d.rep;
            }
            continue;
        }
        let lr = ln_abs(d.ends[0].0);
        let ll = ln_abs(d.ends[1].0);
        let bounded = [lr, ll].iter().all(|y| y.is_finite() && y.abs() < libm::log(ASYMPTOTIC));
        if bounded && d.param.is_finite() && PROMOTE * d.err <= cap {
            let at = list.partition_point(|c| c.param < d.param);
            list.insert(
                at,
                Crossing {
                    param: d.param,
                    displacement: lr - ll,
                    word_len: d.depth,
                    witness: d.path,
                    rep: d.rep,
                    param_err: d.err,
                    ends: [d.ends[0].0, d.ends[1].0],
                },
            );
        } else {
            rest.push(d);
        }
    }
    for d in rest {
        let shares_end = ctx.out[d.curve].iter().any(|c| {
            (0..2).any(|side| {
                let (x, r) = d.ends[side];
                let (y, s) = d.ends[1 - side];
                r < MAX_REL_ERR
                    && period_gap(x / c.ends[side], ctx.mult, beta_len) <= 4.0 * (r + c.param_err) + 1e-30
                    && period_gap(y / c.ends[1 - side], ctx.mult, beta_len) <= 4.0 * (s + c.param_err) + 1e-30
            })
        });
        if !shares_end {
            unexplained[d.curve] += 1;
        }
    }
    Ok(Enumeration {
        beta_length: beta_len,
        max_len,
        crossings: ctx.out,
        nodes: ctx.nodes,
        pruned: ctx.pruned,
        unresolved: ctx.unresolved,
        unexplained,
    })
}
