//! Genus-two surfaces in Fenchel–Nielsen coordinates.
//!
//! The surface is two pairs of pants glued along three curves `gamma1..3`.
//! Pants `P1` is realised by the pair `A, B` with `C = (AB)^{-1}`; `P2` is
//! its mirror image across the axis of `A`, twisted by `tau1`. The gluing
//! maps `s` (across `gamma1` then `gamma2`) and `t` (across `gamma1` then
//! `gamma3`) are products of two reflections and a translation. The standard
//! generators are `a1 = B^-1`, `b1 = s^-1`, `a2 = t^-1`, `b2 = C`, which
//! satisfy `[a1,b1][a2,b2] = 1`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::hyp2::{BoundaryPoint, Hyp2Error, MoebiusMap, OrientedGeodesic};
use crate::lifts::{self, Enumeration, TargetRep};
use crate::real::{dd, sinh_cosh, Dd};
use crate::word::{Letter, Word};

/// Default maximum word length for lift enumeration.
pub const DEFAULT_MAX_WORD: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("invalid Fenchel-Nielsen coordinates: {0}")]
    InvalidCoordinates(&'static str),
    #[error("holonomy element is not hyperbolic: {0}")]
    Geometry(#[from] Hyp2Error),
    #[error("lift enumeration for `{curve}` did not stabilise by word length {max_len} ({short} orbits at length {}, {long} at {max_len})", max_len - 1)]
    EnumerationInconclusive {
        curve: String,
        max_len: usize,
        short: usize,
        long: usize,
    },
    #[error("no curve named `{0}` in the table")]
    UnknownCurve(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnPoint {
    pub lengths: [f64; 3],
    pub twists: [f64; 3],
}

impl FnPoint {
    pub fn new(lengths: [f64; 3], twists: [f64; 3]) -> Result<Self, SurfaceError> {
        if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(SurfaceError::InvalidCoordinates("lengths must be positive and finite"));
        }
        if twists.iter().any(|t| !t.is_finite()) {
            return Err(SurfaceError::InvalidCoordinates("twists must be finite"));
        }
        Ok(FnPoint { lengths, twists })
    }

    /// From `[l1, l2, l3, tau1, tau2, tau3]`.
    pub fn from_slice(v: &[f64]) -> Result<Self, SurfaceError> {
        if v.len() != 6 {
            return Err(SurfaceError::InvalidCoordinates("expected six coordinates"));
        }
        Self::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    }
}

/// A free homotopy class, named and given by a word in the standard
/// generators, with its intersection numbers against `gamma1..3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveClass {
    pub name: String,
    pub word: Word,
    pub dt: [u32; 3],
}

impl CurveClass {
    pub fn new(name: &str, word: &str, dt: [u32; 3]) -> Self {
        CurveClass {
            name: name.into(),
            word: Word::parse(word).expect("curve table words are well formed"),
            dt,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Holonomy {
    pub point: FnPoint,
    /// Generator matrices indexed like [`Letter`]: `a1, a1^-1, b1, ...`.
    pub letters: [MoebiusMap; 8],
    /// `A, B, C`, the images of `gamma1..3` as seen from `P1`.
    pub pants: [MoebiusMap; 3],
}

impl Holonomy {
    pub fn eval(&self, w: &Word) -> MoebiusMap {
        w.0.iter()
            .fold(MoebiusMap::identity(), |acc, l| acc.compose(&self.letters[l.index()]))
    }

    pub fn generator(&self, l: Letter) -> MoebiusMap {
        self.letters[l.index()]
    }

    /// `[a1,b1][a2,b2]` measured against the identity, up to sign.
    pub fn relator_residual(&self) -> f64 {
        let w = Word::parse("a1 b1 A1 B1 a2 b2 A2 B2").expect("relator");
        self.eval(&w).distance_projective(&MoebiusMap::identity())
    }
}

/// `z -> e^t z`, from `e^{t/2} = c + s`.
fn dilation(c: Dd, s: Dd) -> MoebiusMap {
    let e = c + s;
    MoebiusMap::raw(e, dd(0.0), dd(0.0), dd(1.0) / e)
}

/// Translation by `t` along the unit circle geodesic, given `e = e^{t/2}`.
/// Products of these compose exactly in `e`, so the distances between axes
/// set from hexagon data are shared by every map that uses them.
fn along_unit_circle(e: Dd) -> MoebiusMap {
    let r = dd(1.0) / e;
    let c = (e + r) / dd(2.0);
    let s = (e - r) / dd(2.0);
    MoebiusMap::raw(c, s, s, c)
}

fn plus(x: &MoebiusMap, y: &MoebiusMap) -> MoebiusMap {
    MoebiusMap::raw(x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d)
}

fn neg(x: &MoebiusMap) -> MoebiusMap {
    MoebiusMap::raw(-x.a, -x.b, -x.c, -x.d)
}

/// `diag(e^{t/2} - 1, e^{-t/2} - 1)` for `t = 2 asinh(sh)`, free of
/// cancellation for small `t`.
fn dilation_minus_identity(ch: Dd, sh: Dd) -> MoebiusMap {
    let up = sh + sh * sh / (ch + dd(1.0));
    let down = -up / (dd(1.0) + up);
    MoebiusMap::raw(up, dd(0.0), dd(0.0), down)
}

/// Holonomy of the hyperbolic structure at `p`, conjugated so that a point of
/// the thick part of `P1` sits at `i`.
///
/// Distances along the common perpendiculars from `gamma1` come from hexagon
/// trigonometry. Every generator is assembled from translations along the
/// imaginary axis (the axis of `gamma1` in its own frame) and along the unit
/// circle, grouped so that no product cancels large entries.
pub fn build_holonomy(p: &FnPoint) -> Result<Holonomy, SurfaceError> {
    let p = FnPoint::new(p.lengths, p.twists)?;
    let sh: [Dd; 3] = core::array::from_fn(|i| dd(libm::sinh(p.lengths[i] / 2.0)));
    let ch: [Dd; 3] = core::array::from_fn(|i| (dd(1.0) + sh[i] * sh[i]).sqrt());

    // e^{d/2} for the perpendiculars from gamma1 to gamma2 and to gamma3.
    let half_mult = |k: Dd| ((k + dd(1.0)) / dd(2.0)).sqrt() + ((k - dd(1.0)) / dd(2.0)).sqrt();
    let k12 = (ch[0] * ch[1] + ch[2]) / (sh[0] * sh[1]);
    let k13 = (ch[0] * ch[2] + ch[1]) / (sh[0] * sh[2]);
    let e12 = half_mult(k12);
    let e13 = half_mult(k13);

    // Base point on the gamma1-gamma2 perpendicular, splitting it in
    // proportion to the collar widths.
    let d12 = libm::acosh(k12.hi());
    let w1 = libm::asinh(1.0 / sh[0].hi());
    let w2 = libm::asinh(1.0 / sh[1].hi());
    let e0 = dd(libm::exp(0.5 * d12 * w1 / (w1 + w2)));

    let m = along_unit_circle(dd(1.0) / e0);
    let m_inv = along_unit_circle(e0);
    let to_b = along_unit_circle(e12 / e0);
    let to_c = along_unit_circle(e13 / e0);
    let u12 = along_unit_circle(e12);
    let u13 = along_unit_circle(e13);

    let a = plus(
        &MoebiusMap::identity(),
        &m.compose(&dilation_minus_identity(ch[0], sh[0])).compose(&m_inv),
    );
    let b = to_b.compose(&dilation(ch[1], sh[1]).inverse()).compose(&to_b.inverse());
    let mut c = a.compose(&b).inverse();
    if c.trace().hi() < 0.0 {
        c = neg(&c);
    }

    // Gluing maps, each a product of reflections in two boundary axes of P1
    // with the twists along them:
    //   s = -m U(d12) D(-tau2) U(d12) D(-tau1) m^-1
    //   t = -m H U(d13) D(-tau3) U(d13) H^-1 D(-tau1) m^-1
    // with D the dilation along the imaginary axis and H = D(l1/2) the step
    // between the feet of the two perpendiculars on gamma1.
    let tw: [MoebiusMap; 3] = core::array::from_fn(|i| {
        let (s, c) = sinh_cosh(-p.twists[i] / 2.0);
        dilation(c, s)
    });
    let half = (ch[0] + sh[0]).sqrt();
    let hm = MoebiusMap::raw(half, dd(0.0), dd(0.0), dd(1.0) / half);
    let hm_minus = MoebiusMap::raw(half - dd(1.0), dd(0.0), dd(0.0), (dd(1.0) - half) / half);
    let tail = tw[0].compose(&m_inv);
    let s_el = neg(&to_b.compose(&tw[1]).compose(&u12).compose(&tail));
    // m H U(d13) = U(d13 - d0) + m (H - I) U(d13)
    let frame_c = plus(&to_c, &m.compose(&hm_minus).compose(&u13));
    let t_el = neg(&frame_c
        .compose(&tw[2])
        .compose(&u13)
        .compose(&hm.inverse())
        .compose(&tail));

    let gens = [b.inverse(), s_el.inverse(), t_el.inverse(), c];
    let letters = core::array::from_fn(|i| {
        let g = gens[i / 2];
        if i % 2 == 0 {
            g
        } else {
            g.inverse()
        }
    });
    Ok(Holonomy { point: p, letters, pants: [a, b, c] })
}

pub fn geodesic_length(h: &Holonomy, c: &CurveClass) -> Result<f64, SurfaceError> {
    Ok(h.eval(&c.word).translation_length()?)
}

/// Words for `gamma1..3` in the standard generators.
pub fn pants_word(i: usize) -> Word {
    let w = ["B2 a1", "A1", "b2"][i];
    Word::parse(w).expect("pants words")
}

/// The fixed panel of curve classes: the pants curves, one dual curve per
/// pants curve, and two composites.
pub fn curve_table() -> Vec<CurveClass> {
    alloc::vec![
        CurveClass::new("gamma1", "B2 a1", [0, 0, 0]),
        CurveClass::new("gamma2", "A1", [0, 0, 0]),
        CurveClass::new("gamma3", "b2", [0, 0, 0]),
        CurveClass::new("delta1", DELTA1, [2, 0, 0]),
        CurveClass::new("delta2", DELTA2, [0, 2, 0]),
        CurveClass::new("delta3", DELTA3, [0, 0, 2]),
        CurveClass::new("delta1delta2", COMP12, [2, 2, 0]),
        CurveClass::new("sigma12", "B1", [1, 1, 0]),
    ]
}

const DELTA1: &str = "a1 b1 A1 B1";
const DELTA2: &str = "A1 b2 B1 B2 a1 b1";
const DELTA3: &str = "A1 b2 A2 B2 a1 a2";
const COMP12: &str = "a1 b1 A1 B1 A1 b2 B1 B2 a1 b1";

pub fn find_curve<'a>(table: &'a [CurveClass], name: &str) -> Result<&'a CurveClass, SurfaceError> {
    table
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| SurfaceError::UnknownCurve(name.into()))
}

/// Enumerates crossings of every curve in `curves` with the axis of the
/// pants curve `gamma_{pants_index+1}`.
pub fn crossings_with_pants(
    h: &Holonomy,
    curves: &[CurveClass],
    pants_index: usize,
    max_len: usize,
) -> Result<Enumeration, SurfaceError> {
    let beta = h.eval(&pants_word(pants_index));
    crossings_with(h, &beta, curves, max_len)
}

pub fn crossings_with(
    h: &Holonomy,
    beta: &MoebiusMap,
    curves: &[CurveClass],
    max_len: usize,
) -> Result<Enumeration, SurfaceError> {
    let targets: Vec<Vec<TargetRep>> = curves
        .iter()
        .map(|c| target_reps(h, &c.word))
        .collect::<Result<_, _>>()?;
    Ok(lifts::enumerate(&h.letters, beta, &targets, max_len)?)
}

/// The cyclic rotations of `w` whose axes can be located accurately, with
/// those axes. A crossing's [`lifts::Crossing::rep`] indexes this list.
pub fn target_representatives(h: &Holonomy, w: &Word) -> Result<Vec<(Word, OrientedGeodesic)>, SurfaceError> {
    Ok(rotation_axes(h, w)?.into_iter().map(|(r, a, _)| (r, a)).collect())
}

fn target_reps(h: &Holonomy, w: &Word) -> Result<Vec<TargetRep>, SurfaceError> {
    Ok(rotation_axes(h, w)?
        .into_iter()
        .map(|(_, axis, endpoint_err)| TargetRep { axis, endpoint_err })
        .collect())
}

/// Axes of the cyclic rotations of `w` that can be located to about `1e-18`
/// relative accuracy, each with an error estimate.
///
/// Only the best conditioned rotation is checked against its neighbours:
/// rotation `k+1` is `l^-1 (rotation k) l` for the first letter `l` of
/// rotation `k`. Any other rotation `k` is `Q^-1 c Q` for a prefix `Q` of that
/// rotation `c` and `R c R^-1` for the complementary suffix `R`, and is
/// checked against both moved copies of the axis of `c`. Neighbouring
/// rotations tend to share their rounding, and transport along an expanding
/// direction is itself poor, so the smaller gap at each endpoint is kept.
fn rotation_axes(h: &Holonomy, w: &Word) -> Result<Vec<(Word, OrientedGeodesic, f64)>, SurfaceError> {
    let all = rotations(w);
    let n = all.len();
    let maps: Vec<MoebiusMap> = all.iter().map(|r| h.eval(r)).collect();
    let cond = |m: &MoebiusMap| {
        let e = m.max_abs_entry();
        e * e / m.discriminant().hi().max(1e-300)
    };
    let src = (0..n).min_by(|&i, &j| cond(&maps[i]).total_cmp(&cond(&maps[j]))).unwrap_or(0);
    let src_axis = maps[src].axis()?;
    let gap = |a: &OrientedGeodesic, b: &OrientedGeodesic| {
        point_gap(a.start, b.start).max(point_gap(a.end, b.end))
    };
    let src_err = if n < 2 {
        0.0
    } else {
        let next = maps[(src + 1) % n].axis()?.image(&h.generator(all[src].0[0]));
        let prev_i = (src + n - 1) % n;
        let prev = src_axis.image(&h.generator(all[prev_i].0[0]));
        gap(&src_axis, &next).min(gap(&maps[prev_i].axis()?, &prev))
    };
    let c = &all[src].0;
    let mut out = Vec::new();
    for k in 0..n {
        if k == src {
            out.push((all[k].clone(), src_axis, src_err));
            continue;
        }
        if !well_conditioned(&maps[k]) {
            continue;
        }
        let ax = maps[k].axis()?;
        let m = (k + n - src) % n;
        let q = h.eval(&Word(c[..m].to_vec()).inverse());
        let r = h.eval(&Word(c[m..].to_vec()));
        let (tq, tr) = (src_axis.image(&q), src_axis.image(&r));
        let moved = point_gap(ax.start, tq.start)
            .min(point_gap(ax.start, tr.start))
            .max(point_gap(ax.end, tq.end).min(point_gap(ax.end, tr.end)));
        let err = moved + src_err;
        out.push((all[k].clone(), ax, err));
    }
    Ok(out)
}

/// `|p x q|` for unit homogeneous representatives: the sine of the angle
/// between the two points on `RP^1`.
fn point_gap(p: BoundaryPoint, q: BoundaryPoint) -> f64 {
    let hom = |x: BoundaryPoint| match x {
        BoundaryPoint::Finite(v) => {
            let r = (v * v + dd(1.0)).sqrt();
            [v / r, dd(1.0) / r]
        }
        BoundaryPoint::Infinity => [dd(1.0), dd(0.0)],
    };
    let (a, b) = (hom(p), hom(q));
    (a[0] * b[1] - a[1] * b[0]).abs().hi()
}

/// Whether the axis of `m` can be located to about `1e-18` relative
/// accuracy: conjugates by long elements have huge entries but a small
/// trace, and their fixed points drown in cancellation.
fn well_conditioned(m: &MoebiusMap) -> bool {
    let n = m.max_abs_entry();
    n * n <= 1e14 * m.discriminant().hi().max(1.0)
}

/// Distinct cyclic rotations of the cyclic reduction of `w`.
pub fn rotations(w: &Word) -> Vec<Word> {
    let c = w.cyclically_reduced().0;
    let n = c.len();
    let mut out: Vec<Word> = Vec::with_capacity(n.max(1));
    for k in 0..n.max(1) {
        let r = Word((0..n).map(|i| c[(i + k) % n]).collect());
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Geometric intersection number of `c` with `gamma_{pants_index+1}`,
/// counted as `<gamma>`-orbits of lifts of `c` crossing one axis.
pub fn geometric_intersection(
    h: &Holonomy,
    c: &CurveClass,
    pants_index: usize,
) -> Result<u32, SurfaceError> {
    geometric_intersections(h, core::slice::from_ref(c), pants_index, DEFAULT_MAX_WORD)
        .map(|v| v[0])
}

/// Batched form of [`geometric_intersection`] with an explicit word bound.
pub fn geometric_intersections(
    h: &Holonomy,
    curves: &[CurveClass],
    pants_index: usize,
    max_len: usize,
) -> Result<Vec<u32>, SurfaceError> {
    let gw = pants_word(pants_index);
    let live: Vec<CurveClass> = curves
        .iter()
        .filter(|c| !c.word.same_unoriented_class(&gw))
        .cloned()
        .collect();
    let en = crossings_with_pants(h, &live, pants_index, max_len)?;
    let mut out = Vec::with_capacity(curves.len());
    let mut j = 0;
    for c in curves {
        if c.word.same_unoriented_class(&gw) {
            out.push(0);
            continue;
        }
        if !en.is_stable(j) {
            return Err(SurfaceError::EnumerationInconclusive {
                curve: c.name.clone(),
                max_len,
                short: en.count_at(j, max_len - 1),
                long: en.count_at(j, max_len),
            });
        }
        out.push(en.crossings[j].len() as u32);
        j += 1;
    }
    Ok(out)
}

/// Lower bound on the Teichmüller distance between two structures: lengths
/// change by at most a factor `e^{2d}` under a map of distance `d`.
pub fn distance_lower_bound(
    h1: &Holonomy,
    h2: &Holonomy,
    panel: &[CurveClass],
) -> Result<f64, SurfaceError> {
    let mut best = 0.0f64;
    for c in panel {
        let l1 = geodesic_length(h1, c)?;
        let l2 = geodesic_length(h2, c)?;
        best = best.max(0.5 * libm::fabs(libm::log(l2 / l1)));
    }
    Ok(best)
}
