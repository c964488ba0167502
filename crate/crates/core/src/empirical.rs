//! Empirical measures of sample paths, exact Kolmogorov-Smirnov
//! sup-deviations, and the bracket upper bound on the sup-deviation over a
//! class covered by a finite bracket net.

use std::fmt;
use std::path::Path as FsPath;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};
use crate::generators::{Cdf, Path, StationaryModel};
use crate::numeric::{compensated_mean, compensated_sum, quantile_sorted};

/// A real function of the observations.
#[derive(Clone)]
pub struct Observable {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    identity: bool,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("label", &self.label).finish()
    }
}

impl Observable {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Observable {
            label: label.into(),
            eval: Arc::new(eval),
            identity: false,
        }
    }

    pub fn identity() -> Self {
        Observable {
            identity: true,
            ..Observable::new("identity", |x| x)
        }
    }

    /// Whether this was built by [`Observable::identity`].
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn constant(c: f64) -> Self {
        Observable::new(format!("const({c})"), move |_| c)
    }

    /// `1_{(-inf, t]}`; `t = -inf` gives the zero function and `t = +inf`
    /// the unit function.
    pub fn half_line(t: f64) -> Self {
        Observable::new(format!("1(x<={t})"), move |x| if x <= t { 1.0 } else { 0.0 })
    }

    /// `a * f + b * g`.
    pub fn combine(a: f64, f: &Observable, b: f64, g: &Observable) -> Self {
        let (f, g) = (f.eval.clone(), g.eval.clone());
        Observable::new(format!("lin({a},{b})"), move |x| a * f(x) + b * g(x))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

fn require_nonempty(path: &Path) -> Result<()> {
    if path.is_empty() {
        return Err(invalid_input("path is empty"));
    }
    Ok(())
}

/// `P_n(f) = (1/n) sum f(X_i)`, summed with compensation.
pub fn empirical_measure(path: &Path, f: &Observable) -> Result<f64> {
    require_nonempty(path)?;
    Ok(compensated_sum(path.values.iter().map(|x| f.eval(*x))) / path.len() as f64)
}

/// `P_n(C)`: fraction of the path inside the set `C`.
pub fn empirical_set_measure(path: &Path, contains: impl Fn(f64) -> bool) -> Result<f64> {
    require_nonempty(path)?;
    let count = path.values.iter().filter(|x| contains(**x)).count();
    Ok(count as f64 / path.len() as f64)
}

/// `F_n(x)`.
pub fn empirical_cdf(path: &Path, x: f64) -> Result<f64> {
    empirical_set_measure(path, |v| v <= x)
}

/// `sup_x |F_n(x) - F(x)|`, exact.
///
/// The supremum is attained at an order statistic, either at the value
/// itself or as the left limit there. With ties the gaps are evaluated once
/// per distinct value using the full jump of `F_n`.
pub fn ks_sup_deviation<F: Cdf + ?Sized>(path: &Path, cdf: &F) -> Result<f64> {
    require_nonempty(path)?;
    if path.values.iter().any(|v| v.is_nan()) {
        return Err(invalid_input("path contains NaN"));
    }
    let mut sorted = path.values.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(ks_sorted(&sorted, cdf))
}

pub(crate) fn ks_sorted<F: Cdf + ?Sized>(sorted: &[f64], cdf: &F) -> f64 {
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let v = sorted[start];
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == v {
            end += 1;
        }
        let above = (end as f64 / n - cdf.cdf(v)).abs();
        let below = (start as f64 / n - cdf.cdf_left(v)).abs();
        worst = worst.max(above).max(below);
        start = end;
    }
    worst
}

/// `U_i = F(X_i)`.
pub fn probability_integral_transform<F: Cdf + ?Sized>(path: &Path, cdf: &F) -> Path {
    Path {
        values: path.values.iter().map(|x| cdf.cdf(*x)).collect(),
        seed: path.seed,
        model_id: format!("pit[{}]", path.model_id),
    }
}

/// One bracket `[lower, upper]` with the exact expectations of both ends.
#[derive(Clone, Debug)]
pub struct Bracket {
    pub lower: Observable,
    pub upper: Observable,
    pub lower_mean: f64,
    pub upper_mean: f64,
}

/// A finite cover of a function class by brackets of width at most `level`.
#[derive(Clone, Debug)]
pub struct BracketNet {
    level: f64,
    brackets: Vec<Bracket>,
}

/// Slack allowed on bracket widths.
pub const WIDTH_TOL: f64 = 1e-12;

impl BracketNet {
    /// Checks `E[upper] - E[lower] <= level` for every bracket.
    pub fn new(level: f64, brackets: Vec<Bracket>) -> Result<Self> {
        if !(level > 0.0) {
            return Err(Error::InvalidParameter(format!("bracket level must be positive, got {level}")));
        }
        if brackets.is_empty() {
            return Err(invalid_input("bracket net is empty"));
        }
        for (i, b) in brackets.iter().enumerate() {
            let width = b.upper_mean - b.lower_mean;
            if width > level + WIDTH_TOL || width < -WIDTH_TOL {
                return Err(invalid_input(format!(
                    "bracket {i} has width {width}, outside [0, {level}]"
                )));
            }
        }
        Ok(BracketNet { level, brackets })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn len(&self) -> usize {
        self.brackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.brackets.is_empty()
    }

    /// Checks `lower <= upper` pointwise on `grid`.
    pub fn check_order(&self, grid: &[f64]) -> Result<()> {
        for (i, b) in self.brackets.iter().enumerate() {
            if let Some(x) = grid.iter().find(|x| b.lower.eval(**x) > b.upper.eval(**x)) {
                return Err(invalid_input(format!("bracket {i} has lower > upper at x = {x}")));
            }
        }
        Ok(())
    }
}

/// `level + max_i max(E[l_i] - P_n(l_i), P_n(u_i) - E[u_i])`.
///
/// This dominates `sup_f |P_n(f) - E f|` over every `f` the net covers.
pub fn bracket_sup_bound(path: &Path, net: &BracketNet) -> Result<f64> {
    require_nonempty(path)?;
    let mut worst = f64::NEG_INFINITY;
    for b in net.brackets() {
        let low = b.lower_mean - empirical_measure(path, &b.lower)?;
        let up = empirical_measure(path, &b.upper)? - b.upper_mean;
        worst = worst.max(low).max(up);
    }
    Ok(net.level() + worst)
}

/// Replicate summary of the sup-deviation at one sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q90: f64,
}

/// Sup-deviation statistics along an increasing grid of sample sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationPath {
    pub rows: Vec<DeviationStats>,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Serialize)]
struct DeviationRow {
    n: usize,
    mean: f64,
    median: f64,
    q90: f64,
    reps: usize,
    seed: u64,
}

impl DeviationPath {
    pub fn n_grid(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean).collect()
    }

    /// CSV with columns `n,mean,median,q90,reps,seed`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(DeviationRow {
                n: r.n,
                mean: r.mean,
                median: r.median,
                q90: r.q90,
                reps: self.reps,
                seed: self.seed,
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Parses the CSV written by [`DeviationPath::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            n: usize,
            mean: f64,
            median: f64,
            q90: f64,
            reps: usize,
            seed: u64,
        }
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        let mut meta = None;
        for rec in reader.deserialize::<Row>() {
            let r = rec.map_err(|e| invalid_input(format!("deviation csv: {e}")))?;
            meta = Some((r.reps, r.seed));
            rows.push(DeviationStats {
                n: r.n,
                mean: r.mean,
                median: r.median,
                q90: r.q90,
            });
        }
        let (reps, seed) = meta.ok_or_else(|| invalid_input("deviation csv has no rows"))?;
        Ok(DeviationPath { rows, reps, seed })
    }
}

pub(crate) fn validate_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(invalid_input("sample-size grid is empty"));
    }
    if n_grid[0] == 0 {
        return Err(invalid_input("sample sizes must be positive"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid_input("sample-size grid must be strictly increasing"));
    }
    Ok(())
}

/// Simulates `reps` independent paths of the model and records the KS
/// sup-deviation of each prefix of length `n` in `n_grid`.
///
/// Replicate `r` draws from stream `r` of `seed` and only the longest path is
/// held per replicate. Replicates run on the current rayon pool and are
/// merged by index, so the result does not depend on the thread count.
pub fn run_gc_diagnostic(model: &StationaryModel, n_grid: &[usize], reps: usize, seed: u64) -> Result<DeviationPath> {
    validate_grid(n_grid)?;
    if reps == 0 {
        return Err(invalid_input("replicate count must be at least 1"));
    }
    let n_max = *n_grid.last().expect("nonempty grid");
    let cdf = model.marginal();
    let per_rep: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let path = model.sample_stream(n_max, seed, r)?;
            let mut prefix = Vec::with_capacity(n_max);
            Ok(n_grid
                .iter()
                .map(|&n| {
                    prefix.clear();
                    prefix.extend_from_slice(&path.values[..n]);
                    prefix.sort_by(f64::total_cmp);
                    ks_sorted(&prefix, cdf)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let column: Vec<f64> = per_rep.iter().map(|row| row[k]).collect();
            let mean = compensated_mean(&column);
            let mut sorted = column;
            sorted.sort_by(f64::total_cmp);
            DeviationStats {
                n,
                mean,
                median: quantile_sorted(&sorted, 0.5),
                q90: quantile_sorted(&sorted, 0.9),
            }
        })
        .collect();
    Ok(DeviationPath { rows, reps, seed })
}
