//! Flat `key = value` experiment files.
//!
//! One assignment per line, `#` starts a comment, arrays are comma
//! separated. `plane` may repeat; every other key may appear once.

use std::collections::BTreeMap;
use std::path::PathBuf;

use teichlab_core::graft::{RaySchedule, SimplicialLamination, DEFAULT_THETA};
use teichlab_core::spacetime::{LightlikePlane, MinkowskiVector, RegularDomain, SpacetimeError};
use teichlab_core::surface::{curve_table, find_curve, CurveClass, FnPoint};
use teichlab_core::thurston::DEFAULT_TOL;

/// Convergence runs must cover at least this many decades of `a`.
pub const MIN_DECADES: f64 = 4.0;

pub const DEFAULT_CONCAVITY_SAMPLES: usize = 10_000;

const KEYS: &[&str] = &[
    "fn_base",
    "weights",
    "a0",
    "ratio",
    "steps",
    "K",
    "theta",
    "panel",
    "tol",
    "seed",
    "out",
    "plane",
    "grid_t",
    "grid_x",
    "grid_z",
    "concavity_samples",
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{0}` given twice")]
    Duplicate(String),
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("`{key}`: {msg}")]
    Invalid { key: &'static str, msg: String },
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

/// Raw assignments, in file order per key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Vec<String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: n + 1,
                msg: "expected `key = value`".into(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: n + 1, msg: "empty key".into() });
            }
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey(k.into()));
            }
            let slot = entries.entry(k.into()).or_default();
            if !slot.is_empty() && k != "plane" {
                return Err(ConfigError::Duplicate(k.into()));
            }
            slot.push(v.into());
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    fn get(&self, key: &'static str) -> Option<&str> {
        self.entries.get(key).map(|v| v[0].as_str())
    }

    fn all(&self, key: &'static str) -> &[String] {
        self.entries.get(key).map_or(&[], |v| v.as_slice())
    }

    fn f64(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        self.get(key).map(|s| number(key, s)).transpose()
    }

    fn req_f64(&self, key: &'static str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or(ConfigError::Missing(key))
    }

    fn array(&self, key: &'static str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key).map(|s| numbers(key, s)).transpose()
    }

    fn usize(&self, key: &'static str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|s| s.parse().map_err(|_| invalid(key, format!("`{s}` is not a non-negative integer"))))
            .transpose()
    }

    pub fn seed(&self) -> Result<Option<u64>, ConfigError> {
        self.get("seed")
            .map(|s| s.parse().map_err(|_| invalid("seed", format!("`{s}` is not a non-negative integer"))))
            .transpose()
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.get("out").map(PathBuf::from)
    }
}

fn number(key: &'static str, s: &str) -> Result<f64, ConfigError> {
    let x: f64 = s.trim().parse().map_err(|_| invalid(key, format!("`{}` is not a number", s.trim())))?;
    if !x.is_finite() {
        return Err(invalid(key, "values must be finite"));
    }
    Ok(x)
}

fn numbers(key: &'static str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',').map(|x| number(key, x)).collect()
}

fn fixed<const N: usize>(key: &'static str, v: Vec<f64>) -> Result<[f64; N], ConfigError> {
    let n = v.len();
    v.try_into().map_err(|_| invalid(key, format!("expected {N} values, got {n}")))
}

/// Everything a `converge` or `panel` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub schedule: RaySchedule,
    pub panel: Vec<CurveClass>,
    pub tol: f64,
}

pub fn base_point(raw: &RawConfig) -> Result<FnPoint, ConfigError> {
    let v = raw.array("fn_base")?.ok_or(ConfigError::Missing("fn_base"))?;
    let v: [f64; 6] = fixed("fn_base", v)?;
    FnPoint::from_slice(&v).map_err(|e| invalid("fn_base", e.to_string()))
}

pub fn panel(raw: &RawConfig) -> Result<Vec<CurveClass>, ConfigError> {
    let table = curve_table();
    match raw.get("panel") {
        None => Ok(table),
        Some(s) => {
            let mut out: Vec<CurveClass> = Vec::new();
            for name in s.split(',').map(str::trim) {
                let c = find_curve(&table, name).map_err(|e| invalid("panel", e.to_string()))?;
                if out.iter().any(|o| o.name == c.name) {
                    return Err(invalid("panel", format!("`{name}` listed twice")));
                }
                out.push(c.clone());
            }
            Ok(out)
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let base = base_point(raw)?;
        let w = raw.array("weights")?.ok_or(ConfigError::Missing("weights"))?;
        let lamination = SimplicialLamination::new(fixed("weights", w)?).map_err(|e| invalid("weights", e.to_string()))?;
        let a0 = raw.req_f64("a0")?;
        let ratio = raw.req_f64("ratio")?;
        let steps = raw.usize("steps")?.ok_or(ConfigError::Missing("steps"))?;
        if steps < 2 {
            return Err(invalid("steps", "a schedule needs at least two points"));
        }
        if !(ratio > 1.0) {
            return Err(invalid("ratio", "must exceed 1"));
        }
        let k = raw.f64("K")?.unwrap_or(0.0);
        let theta = raw.f64("theta")?.unwrap_or(DEFAULT_THETA);
        let schedule = RaySchedule::geometric(a0, ratio, steps, base, lamination, k, theta)
            .map_err(|e| invalid("a0", e.to_string()))?;
        if schedule.decades() < MIN_DECADES - 1e-9 {
            return Err(invalid(
                "steps",
                format!("schedule covers {:.3} decades, need {MIN_DECADES}", schedule.decades()),
            ));
        }
        let tol = raw.f64("tol")?.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        let panel = panel(raw)?;
        let table = curve_table();
        for i in lamination.support() {
            let dual = &table[3 + i].name;
            if !panel.iter().any(|c| &c.name == dual) {
                return Err(invalid("panel", format!("`{dual}` is needed for the grafted curve gamma{}", i + 1)));
            }
        }
        Ok(ExperimentConfig { schedule, panel, tol })
    }
}

/// `lo, hi, n`: `n` evenly spaced values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.lo + k as f64 * step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeConfig {
    pub planes: Vec<LightlikePlane>,
    /// Time, then the two space axes.
    pub grid: [Axis; 3],
    pub concavity_samples: usize,
}

fn axis(raw: &RawConfig, key: &'static str) -> Result<Axis, ConfigError> {
    let v = raw.array(key)?.ok_or(ConfigError::Missing(key))?;
    let [lo, hi, n] = fixed(key, v)?;
    if !(n >= 1.0 && n.fract() == 0.0 && n <= 1e7) {
        return Err(invalid(key, "point count must be a positive integer"));
    }
    if hi < lo {
        return Err(invalid(key, "upper end below lower end"));
    }
    Ok(Axis { lo, hi, n: n as usize })
}

impl SpacetimeConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let planes = raw
            .all("plane")
            .iter()
            .map(|s| {
                let [n0, n1, n2, offset] = fixed("plane", numbers("plane", s)?)?;
                LightlikePlane::new(MinkowskiVector::new(n0, n1, n2), offset).map_err(|e| invalid("plane", e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if planes.is_empty() {
            return Err(ConfigError::Missing("plane"));
        }
        let concavity_samples = raw.usize("concavity_samples")?.unwrap_or(DEFAULT_CONCAVITY_SAMPLES);
        Ok(SpacetimeConfig {
            planes,
            grid: [axis(raw, "grid_t")?, axis(raw, "grid_x")?, axis(raw, "grid_z")?],
            concavity_samples,
        })
    }

    pub fn domain(&self) -> Result<RegularDomain, SpacetimeError> {
        RegularDomain::new(self.planes.clone())
    }
}
