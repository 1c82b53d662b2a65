use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use teichlab_core::spacetime::{SpacetimeError, Stratum};
use teichlab_core::surface::{self, build_holonomy};
use teichlab_core::thurston::{self, ConvergenceReport};

use crate::config::{base_point, panel, ConfigError, ExperimentConfig, RawConfig, SpacetimeConfig};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// A verdict, audit or self-test came out false.
    Failed = 1,
    Config = 2,
    Numeric = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Numeric(String),
}

impl RunError {
    pub fn exit(&self) -> Exit {
        match self {
            RunError::Config(_) | RunError::Write { .. } => Exit::Config,
            RunError::Numeric(_) => Exit::Numeric,
        }
    }
}

/// Applies `f` to every item on up to `threads` threads. The result is in
/// item order whatever the thread count.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), RunError> {
    let path = dir.join(name);
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(&path, text))
        .map_err(|source| RunError::Write { path, source })
}

pub fn converge(raw: &RawConfig, out: &Path, threads: usize, seed: u64) -> Result<(Exit, ConvergenceReport), RunError> {
    let cfg = ExperimentConfig::from_raw(raw)?;
    let s = &cfg.schedule;
    let points = par_map(s.a_values(), threads, |&a| thurston::evaluate_point(s, &cfg.panel, a))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Numeric(e.to_string()))?;
    let report = thurston::assemble_report(s, &cfg.panel, cfg.tol, points);
    write(out, "convergence.csv", &convergence_csv(&report))?;
    write(out, "report.txt", &report_text(&cfg, &report, seed))?;
    Ok((if report.verdict { Exit::Ok } else { Exit::Failed }, report))
}

pub fn convergence_csv(r: &ConvergenceReport) -> String {
    let names = &r.target.names;
    let mut s = String::from("a");
    for prefix in ["length", "scaled", "normalized"] {
        for n in names {
            write!(s, ",{prefix}_{n}").unwrap();
        }
    }
    s.push_str(",projective_error");
    if let Some(p) = r.points.first() {
        for (i, _) in &p.twist_products {
            write!(s, ",twist_product_gamma{}", i + 1).unwrap();
        }
    }
    s.push('\n');
    for p in &r.points {
        let cells = std::iter::once(p.a)
            .chain(p.lengths.entries.iter().copied())
            .chain(p.scaled.iter().copied())
            .chain(p.normalized.entries.iter().copied())
            .chain([p.error])
            .chain(p.twist_products.iter().map(|t| t.1));
        let row: Vec<String> = cells.map(num).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn report_text(cfg: &ExperimentConfig, r: &ConvergenceReport, seed: u64) -> String {
    let s = &cfg.schedule;
    let a = s.a_values();
    let w = s.lamination.weights();
    let mut t = String::new();
    writeln!(t, "verdict = {}", r.verdict).unwrap();
    writeln!(t, "diagnostic = {}", r.diagnostic.as_deref().unwrap_or("none")).unwrap();
    writeln!(t, "weights = {}, {}, {}", w[0], w[1], w[2]).unwrap();
    writeln!(t, "schedule = {} points, a from {} to {}", a.len(), num(a[0]), num(a[a.len() - 1])).unwrap();
    writeln!(t, "K = {}", s.k).unwrap();
    writeln!(t, "theta = {}", s.theta).unwrap();
    writeln!(t, "tol = {}", r.tol).unwrap();
    writeln!(t, "seed = {seed}").unwrap();
    writeln!(t, "panel = {}", r.target.names.join(", ")).unwrap();
    let target: Vec<String> = r.target.entries.iter().map(|x| x.to_string()).collect();
    writeln!(t, "target = {}", target.join(", ")).unwrap();
    if let Some(last) = r.points.last() {
        writeln!(t, "final projective error = {}", num(last.error)).unwrap();
    }
    if let Some(first) = r.points.first() {
        for (k, (i, _)) in first.twist_products.iter().enumerate() {
            let m = r.points.iter().fold(0.0f64, |m, p| m.max(p.twist_products[k].1));
            writeln!(t, "max twist product gamma{} = {}", i + 1, num(m)).unwrap();
        }
    }
    t
}

fn stratum(s: Stratum) -> String {
    match s {
        Stratum::Edge(i, j) => format!("edge {i} {j}"),
        Stratum::Vertex(i, j, k) => format!("vertex {i} {j} {k}"),
    }
}

pub fn spacetime(raw: &RawConfig, out: &Path, threads: usize, seed: u64) -> Result<Exit, RunError> {
    let cfg = SpacetimeConfig::from_raw(raw)?;
    let d = cfg.domain().map_err(|e| match e {
        SpacetimeError::EmptyDomain => RunError::Numeric(e.to_string()),
        e => RunError::Config(ConfigError::Invalid { key: "plane", msg: e.to_string() }),
    })?;
    let [ts, xs, zs] = cfg.grid.map(|a| a.values());
    let mut grid = Vec::with_capacity(ts.len() * xs.len() * zs.len());
    for &t in &ts {
        for &x in &xs {
            for &z in &zs {
                grid.push(teichlab_core::spacetime::MinkowskiVector::new(t, x, z));
            }
        }
    }
    let rows = par_map(&grid, threads, |&p| {
        let [x0, x1, x2] = p.0.map(num);
        match d.cosmological_time(p) {
            Ok(c) => {
                let [r0, r1, r2] = c.retraction_point.0.map(num);
                format!("{x0},{x1},{x2},{},{r0},{r1},{r2},{}\n", num(c.time), stratum(c.stratum))
            }
            Err(SpacetimeError::OutsideDomain) => format!("{x0},{x1},{x2},,,,,outside\n"),
            Err(e) => format!("{x0},{x1},{x2},,,,,{e}\n"),
        }
    });
    let mut csv = String::from("x0,x1,x2,T,r0,r1,r2,stratum\n");
    csv.extend(rows);
    write(out, "cosmo.csv", &csv)?;

    let c = d.check_concavity(cfg.concavity_samples, seed);
    let mut t = String::new();
    let kind = if d.is_wedge() { "degenerate-regular (two planes)" } else { "regular" };
    writeln!(t, "domain = {kind}, {} planes", d.planes().len()).unwrap();
    writeln!(t, "edges = {}", d.edges().len()).unwrap();
    writeln!(t, "vertices = {}", d.vertices().len()).unwrap();
    writeln!(t, "samples = {}", c.samples).unwrap();
    writeln!(t, "seed = {seed}").unwrap();
    writeln!(t, "violations = {}", c.violations.len()).unwrap();
    writeln!(t, "min slack = {}", num(c.min_slack)).unwrap();
    for (p, q) in c.violations.iter().take(10) {
        writeln!(t, "violation {:?} {:?}", p.0, q.0).unwrap();
    }
    write(out, "concavity.txt", &t)?;
    Ok(if c.violations.is_empty() { Exit::Ok } else { Exit::Failed })
}

/// Prints the curve table and checks its intersection numbers at `fn_base`.
pub fn panel_check(raw: &RawConfig, threads: usize) -> Result<(Exit, String), RunError> {
    let p = base_point(raw)?;
    let curves = panel(raw)?;
    let h = build_holonomy(&p).map_err(|e| RunError::Numeric(e.to_string()))?;
    let mut t = String::new();
    writeln!(t, "{:<14} {:<40} {:>3} {:>3} {:>3} {:>24}", "curve", "word", "i1", "i2", "i3", "length").unwrap();
    let lengths = curves
        .iter()
        .map(|c| surface::geodesic_length(&h, c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Numeric(e.to_string()))?;
    for (c, l) in curves.iter().zip(&lengths) {
        let w = c.word.to_string();
        writeln!(t, "{:<14} {:<40} {:>3} {:>3} {:>3} {:>24}", c.name, w, c.dt[0], c.dt[1], c.dt[2], num(*l)).unwrap();
    }
    let counts = par_map(&[0, 1, 2], threads, |&i| {
        surface::geometric_intersections(&h, &curves, i, surface::DEFAULT_MAX_WORD)
    });
    let mut ok = true;
    for (i, n) in counts.into_iter().enumerate() {
        let n = n.map_err(|e| RunError::Numeric(e.to_string()))?;
        for (c, k) in curves.iter().zip(n) {
            if k != c.dt[i] {
                ok = false;
                writeln!(t, "mismatch: i({}, gamma{}) = {k}, table says {}", c.name, i + 1, c.dt[i]).unwrap();
            }
        }
    }
    writeln!(t, "validation = {}", if ok { "ok" } else { "failed" }).unwrap();
    Ok((if ok { Exit::Ok } else { Exit::Failed }, t))
}
