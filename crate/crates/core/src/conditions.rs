//! Sufficient conditions for the strong law over function classes:
//! normalised block-variance conditions (C1, C2), their indicator-class
//! versions, Cesàro conditions on covariances of associated sequences,
//! the long-run variance and polynomial decay of the φ-mixing profile.
//!
//! Suprema over all block indices cannot be computed, so every scan stops
//! at `q_max` and classifies the tail by a log-log slope fitted over the
//! upper half of the grid.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::generators::{Cdf, StationaryModel};
use crate::numeric::{log_log_fit, CompensatedSum};

/// Lag covariances `gamma(0), gamma(1), ...` of a stationary sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagCovariance {
    values: Vec<f64>,
}

impl LagCovariance {
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid_input("covariance table is empty"));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid_input(format!("gamma({j}) is not finite")));
        }
        if values[0] < 0.0 {
            return Err(invalid_input(format!("gamma(0) = {} is negative", values[0])));
        }
        Ok(LagCovariance { values })
    }

    /// Tabulates `f(0..=max_lag)`.
    pub fn from_fn(max_lag: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::from_table((0..=max_lag).map(f).collect())
    }

    /// Identity observable of `model`.
    pub fn of_model(model: &StationaryModel, max_lag: usize) -> Result<Self> {
        Self::from_table(model.gamma_table(max_lag))
    }

    /// `1_(-inf, x]` observable of `model`.
    pub fn of_indicator(model: &StationaryModel, x: f64, max_lag: usize) -> Result<Self> {
        Self::from_table(model.indicator_covariance_table(x, max_lag))
    }

    /// Largest tabulated lag.
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self, j: usize) -> Result<f64> {
        self.values.get(j).copied().ok_or_else(|| {
            Error::InsufficientData(format!("gamma({j}) requested, table stops at lag {}", self.max_lag()))
        })
    }

    fn require(&self, lag: usize) -> Result<()> {
        self.gamma(lag).map(|_| ())
    }
}

/// Slope cut-offs used to turn a finite scan into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    /// Fitted exponent at or below which the statistic counts as bounded.
    pub bounded_slope: f64,
    /// Fitted exponent at or above which it counts as diverging.
    pub diverging_slope: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            bounded_slope: 0.05,
            diverging_slope: 0.2,
        }
    }
}

/// Parameters of the C1/C2 scans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcipParams {
    pub delta: f64,
    pub q_max: usize,
    #[serde(default)]
    pub thresholds: VerdictThresholds,
}

impl GcipParams {
    pub fn new(delta: f64, q_max: usize) -> Result<Self> {
        let p = GcipParams {
            delta,
            q_max,
            thresholds: VerdictThresholds::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 3.0) {
            return Err(invalid_param(format!("delta ∈ (0,3) required, got {}", self.delta)));
        }
        if self.q_max < 4 {
            return Err(invalid_param(format!("q_max must be at least 4, got {}", self.q_max)));
        }
        Ok(())
    }

    /// `(1 - delta) / 2`, meaningful for `delta < 1`.
    pub fn nu(&self) -> f64 {
        (1.0 - self.delta) / 2.0
    }

    fn as_map(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("delta".to_string(), self.delta),
            ("q_max".to_string(), self.q_max as f64),
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Bounded,
    Indeterminate,
    Diverging,
    ToZero,
    NotToZero,
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Diverging => "diverging",
            Verdict::ToZero => "to-zero",
            Verdict::NotToZero => "not-to-zero",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    /// Whether the condition is satisfied as far as the scan can tell.
    pub fn is_favourable(&self) -> bool {
        matches!(self, Verdict::Bounded | Verdict::ToZero | Verdict::Pass)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A statistic scanned over a grid, with its tail slope and verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: String,
    pub params: BTreeMap<String, f64>,
    pub q_grid: Vec<usize>,
    pub statistic: Vec<f64>,
    pub sup: f64,
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

impl ConditionReport {
    fn new(condition_id: &str, params: BTreeMap<String, f64>, q_grid: Vec<usize>, statistic: Vec<f64>) -> Self {
        let sup = statistic.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slope = tail_slope(&q_grid, &statistic);
        ConditionReport {
            condition_id: condition_id.to_string(),
            params,
            q_grid,
            statistic,
            sup,
            slope,
            verdict: Verdict::Indeterminate,
        }
    }

    /// Statistic at the largest grid point.
    pub fn last(&self) -> f64 {
        *self.statistic.last().expect("nonempty grid")
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// One row per grid point: `condition_id,q,statistic`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("condition_id,q,statistic\n");
        for (q, s) in self.q_grid.iter().zip(&self.statistic) {
            out.push_str(&format!("{},{},{}\n", self.condition_id, q, s));
        }
        out
    }

    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Log-log slope over the upper half of the grid, ignoring nonpositive
/// values. `None` when fewer than three usable points remain.
fn tail_slope(grid: &[usize], stat: &[f64]) -> Option<f64> {
    let start = grid.len() / 2;
    let xs: Vec<f64> = grid[start..].iter().map(|q| *q as f64).collect();
    log_log_fit(&xs, &stat[start..]).ok().map(|f| f.slope)
}

fn boundedness(report: &ConditionReport, t: &VerdictThresholds) -> Verdict {
    let tail = &report.statistic[report.statistic.len() / 2..];
    if tail.iter().all(|s| *s <= 0.0) {
        // identically zero on the tail: nothing can grow
        return Verdict::Bounded;
    }
    match report.slope {
        Some(s) if s <= t.bounded_slope => Verdict::Bounded,
        Some(s) if s >= t.diverging_slope => Verdict::Diverging,
        _ => Verdict::Indeterminate,
    }
}

/// `Var(S_q) = q gamma(0) + 2 sum_{j<q} (q - j) gamma(j)` for a stationary
/// partial sum of length `q`.
pub fn variance_expansion(gamma: &LagCovariance, q: usize) -> Result<f64> {
    if q == 0 {
        return Err(invalid_param("block length q must be positive"));
    }
    gamma.require(q - 1)?;
    let mut acc = CompensatedSum::new();
    acc.add(q as f64 * gamma.values[0]);
    for j in 1..q {
        acc.add(2.0 * (q - j) as f64 * gamma.values[j]);
    }
    Ok(acc.value())
}

/// Off-diagonal parts `P(m) = sum_{j<m} (m - j) gamma(j)` for
/// `m = 1..=m_max`, via `P(m + 1) = P(m) + sum_{j=1}^{m} gamma(j)`.
fn cross_terms(gamma: &LagCovariance, m_max: usize) -> Result<Vec<f64>> {
    if m_max == 0 {
        return Ok(Vec::new());
    }
    gamma.require(m_max - 1)?;
    let g = &gamma.values;
    let mut out = Vec::with_capacity(m_max);
    let mut p = CompensatedSum::new();
    let mut partial = CompensatedSum::new();
    out.push(0.0);
    for gm in &g[1..m_max] {
        partial.add(*gm);
        p.add(partial.value());
        out.push(p.value());
    }
    Ok(out)
}

/// `Var(S_m)` for `m = 1..=m_max` (index `m - 1`).
pub fn variance_table(gamma: &LagCovariance, m_max: usize) -> Result<Vec<f64>> {
    let g0 = gamma.gamma(0)?;
    Ok(cross_terms(gamma, m_max)?
        .iter()
        .enumerate()
        .map(|(k, p)| (k + 1) as f64 * g0 + 2.0 * p)
        .collect())
}

/// C1: `Var(S_q) / q^((3 - delta)/2)` for `q = 1..=q_max`.
pub fn gcip_c1(gamma: &LagCovariance, params: &GcipParams) -> Result<ConditionReport> {
    params.validate()?;
    let cross = cross_terms(gamma, params.q_max)?;
    let g0 = gamma.values[0];
    let power = (3.0 - params.delta) / 2.0;
    let grid: Vec<usize> = (1..=params.q_max).collect();
    // diagonal and cross terms scaled separately so q gamma(0) / q is exact
    let stat = grid
        .iter()
        .map(|q| {
            let q_f = *q as f64;
            g0 * q_f.powf(1.0 - power) + 2.0 * cross[q - 1] / q_f.powf(power)
        })
        .collect();
    let mut report = ConditionReport::new("gcip-c1", params.as_map(), grid, stat);
    report.verdict = boundedness(&report, &params.thresholds);
    Ok(report)
}

/// C2: `max_{m <= 2q+1} Var(S_m) / q^(3 - delta)` for `q = 1..=q_max`.
///
/// The blocks `q^2 + 1 <= k <= j <= (q + 1)^2` have length at most
/// `2q + 1`, and under stationarity only the length matters.
pub fn gcip_c2(gamma: &LagCovariance, params: &GcipParams) -> Result<ConditionReport> {
    params.validate()?;
    let v = variance_table(gamma, 2 * params.q_max + 1)?;
    let power = 3.0 - params.delta;
    let grid: Vec<usize> = (1..=params.q_max).collect();
    let mut running = f64::NEG_INFINITY;
    let mut next_m = 1;
    let stat = grid
        .iter()
        .map(|q| {
            while next_m <= 2 * q + 1 {
                running = running.max(v[next_m - 1]);
                next_m += 1;
            }
            running / (*q as f64).powf(power)
        })
        .collect();
    let mut report = ConditionReport::new("gcip-c2", params.as_map(), grid, stat);
    report.verdict = boundedness(&report, &params.thresholds);
    Ok(report)
}

/// C1 and C2 for one indicator observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConditions {
    pub x: f64,
    pub c1: ConditionReport,
    pub c2: ConditionReport,
}

/// Per-threshold reports and the least favourable of each kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcepReport {
    pub per_x: Vec<IndicatorConditions>,
    pub worst_c1: ConditionReport,
    pub worst_c2: ConditionReport,
}

fn severity(r: &ConditionReport) -> (u8, f64) {
    let rank = match r.verdict {
        Verdict::Diverging | Verdict::NotToZero | Verdict::Fail => 2,
        Verdict::Indeterminate => 1,
        _ => 0,
    };
    (rank, r.sup)
}

fn worst<'a>(reports: impl Iterator<Item = &'a ConditionReport>) -> ConditionReport {
    reports
        .max_by(|a, b| {
            let (ra, sa) = severity(a);
            let (rb, sb) = severity(b);
            ra.cmp(&rb).then(sa.total_cmp(&sb))
        })
        .expect("nonempty grid")
        .clone()
}

/// C1 and C2 for `1_(-inf, x]` at every `x` in the grid, with
/// `gamma_x(0) = F(x)(1 - F(x))` and `gamma_x(j)` the indicator lag
/// covariance of the model.
pub fn gcep_indicator_conditions(model: &StationaryModel, x_grid: &[f64], params: &GcipParams) -> Result<GcepReport> {
    params.validate()?;
    if x_grid.is_empty() {
        return Err(invalid_input("x grid is empty"));
    }
    let per_x = x_grid
        .par_iter()
        .map(|&x| {
            let gamma = LagCovariance::of_indicator(model, x, 2 * params.q_max)?;
            let mut c1 = gcip_c1(&gamma, params)?;
            let mut c2 = gcip_c2(&gamma, params)?;
            for r in [&mut c1, &mut c2] {
                r.condition_id = format!("gcep-{}", r.condition_id.trim_start_matches("gcip-"));
                r.params.insert("x".into(), x);
                r.params.insert("F(x)".into(), model.marginal().cdf(x));
            }
            Ok(IndicatorConditions { x, c1, c2 })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_c1 = worst(per_x.iter().map(|r| &r.c1));
    let worst_c2 = worst(per_x.iter().map(|r| &r.c2));
    Ok(GcepReport {
        per_x,
        worst_c1,
        worst_c2,
    })
}

/// Cut-offs for the Cesàro scans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroThresholds {
    pub slope: f64,
    pub level: f64,
}

impl Default for CesaroThresholds {
    fn default() -> Self {
        CesaroThresholds {
            slope: -0.2,
            level: 0.05,
        }
    }
}

/// Negative covariances below this are association violations rather
/// than rounding noise.
pub const ASSOCIATION_TOL: f64 = 1e-14;

/// `a_q = (1/q) sum_{j=2}^q Cov(X_1, X_j)^(1/3)` for `q = 2..=q_max`.
pub fn assoc_cesaro_cov13(gamma: &LagCovariance, q_max: usize) -> Result<ConditionReport> {
    assoc_cesaro_with(gamma, q_max, 1.0 / 3.0, CesaroThresholds::default())
}

/// `a_q = (1/q) sum_{j=2}^q Cov(X_1, X_j)` for `q = 2..=q_max`.
pub fn assoc_cesaro_cov(gamma: &LagCovariance, q_max: usize) -> Result<ConditionReport> {
    assoc_cesaro_with(gamma, q_max, 1.0, CesaroThresholds::default())
}

/// Cesàro scan of `Cov(X_1, X_j)^power` with explicit thresholds.
pub fn assoc_cesaro_with(
    gamma: &LagCovariance,
    q_max: usize,
    power: f64,
    thresholds: CesaroThresholds,
) -> Result<ConditionReport> {
    if q_max < 4 {
        return Err(invalid_param(format!("q_max must be at least 4, got {q_max}")));
    }
    gamma.require(q_max - 1)?;
    let mut acc = CompensatedSum::new();
    let mut stat = Vec::with_capacity(q_max - 1);
    for q in 2..=q_max {
        let g = gamma.values[q - 1];
        if g < -ASSOCIATION_TOL {
            return Err(Error::AssociationViolation { lag: q - 1, value: g });
        }
        acc.add(g.max(0.0).powf(power));
        stat.push(acc.value() / q as f64);
    }
    let id = if power == 1.0 { "assoc-cesaro-cov" } else { "assoc-cesaro-cov13" };
    let params = BTreeMap::from([
        ("power".to_string(), power),
        ("q_max".to_string(), q_max as f64),
        ("slope_threshold".to_string(), thresholds.slope),
        ("level_threshold".to_string(), thresholds.level),
    ]);
    let mut report = ConditionReport::new(id, params, (2..=q_max).collect(), stat);
    let last = report.last();
    report.verdict = if last == 0.0 || (report.slope.is_some_and(|s| s <= thresholds.slope) && last < thresholds.level)
    {
        Verdict::ToZero
    } else {
        Verdict::NotToZero
    };
    Ok(report)
}

/// Truncated long-run variance and an estimate of the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongRunVariance {
    /// `gamma(0) + 2 sum_{j=1}^{truncation} gamma(j)`.
    pub value: f64,
    pub truncation: usize,
    /// `2 sum_{j > truncation} gamma(j)` under a geometric fit to the tail
    /// of the table, when one is available.
    pub tail_estimate: Option<f64>,
    /// Raised when the covariances do not decay over the fitted range.
    pub tail_flag: bool,
}

/// Minimum truncation at which a tail fit is attempted.
const TAIL_FIT_MIN: usize = 6;

pub fn long_run_variance(gamma: &LagCovariance, truncation: usize) -> Result<LongRunVariance> {
    gamma.require(truncation)?;
    let g = &gamma.values;
    let mut acc = CompensatedSum::new();
    acc.add(g[0]);
    for v in &g[1..=truncation] {
        acc.add(2.0 * v);
    }
    let (tail_estimate, tail_flag) = if truncation < TAIL_FIT_MIN {
        (None, false)
    } else {
        let tail = &g[truncation / 2 + 1..=truncation];
        if tail.iter().all(|v| *v == 0.0) {
            (Some(0.0), false)
        } else if tail.contains(&0.0) {
            (None, false)
        } else {
            // ln|gamma(j)| = a + j ln(r)
            let xs: Vec<f64> = (truncation / 2 + 1..=truncation).map(|j| j as f64).collect();
            let ys: Vec<f64> = tail.iter().map(|v| v.abs().ln()).collect();
            let ratio = crate::numeric::linear_fit(&xs, &ys)?.slope.exp();
            if ratio < 1.0 - 1e-9 {
                (Some(2.0 * g[truncation] * ratio / (1.0 - ratio)), false)
            } else {
                (None, true)
            }
        }
    };
    Ok(LongRunVariance {
        value: acc.value(),
        truncation,
        tail_estimate,
        tail_flag,
    })
}

/// Relative slack allowed when checking that a profile is nonincreasing.
pub const MONOTONE_TOL: f64 = 1e-9;

/// Polynomial-decay check `phi(r) = O(r^(-4/(1 - delta)))` on a profile
/// `phi(1..=r_max)`.
///
/// Passes when the tail log-log slope is at most `-4/(1 - delta) + 0.1`,
/// or when the profile reaches exactly zero.
pub fn phi_decay_check(profile: &[f64], delta: f64) -> Result<ConditionReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid_param(format!("delta ∈ (0,1) required, got {delta}")));
    }
    if profile.is_empty() {
        return Err(invalid_input("phi profile is empty"));
    }
    if let Some(r) = profile.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(invalid_input(format!("phi({}) = {} is outside [0, 1]", r + 1, profile[r])));
    }
    if let Some(k) = profile
        .windows(2)
        .position(|w| w[1] > w[0] * (1.0 + MONOTONE_TOL) + f64::MIN_POSITIVE)
    {
        return Err(invalid_input(format!(
            "phi profile increases at r = {}: {} -> {}",
            k + 2,
            profile[k],
            profile[k + 1]
        )));
    }
    let threshold = -4.0 / (1.0 - delta) + 0.1;
    let params = BTreeMap::from([
        ("delta".to_string(), delta),
        ("slope_threshold".to_string(), threshold),
        ("r_max".to_string(), profile.len() as f64),
    ]);
    let grid: Vec<usize> = (1..=profile.len()).collect();
    let mut report = ConditionReport::new("phi-decay", params, grid, profile.to_vec());
    let eventually_zero = *profile.last().expect("nonempty") == 0.0;
    report.verdict = if eventually_zero || report.slope.is_some_and(|s| s <= threshold) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report)
}

/// Running means `y_n = (x_1 + ... + x_n) / n`.
pub fn cesaro_mean(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(invalid_input("Cesàro mean of an empty sequence"));
    }
    let mut acc = CompensatedSum::new();
    Ok(x.iter()
        .enumerate()
        .map(|(k, v)| {
            acc.add(*v);
            acc.value() / (k + 1) as f64
        })
        .collect())
}

/// `z_n = (sum_{k<=n} b_k x_k) / b_n` for positive nondecreasing `b`.
pub fn kronecker_weighted(b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if b.len() != x.len() {
        return Err(invalid_input(format!(
            "weights and sequence differ in length ({} vs {})",
            b.len(),
            x.len()
        )));
    }
    if let Some(k) = b.iter().position(|v| !(*v > 0.0)) {
        return Err(invalid_param(format!("weight b_{} = {} is not positive", k + 1, b[k])));
    }
    if let Some(k) = b.windows(2).position(|w| w[1] < w[0]) {
        return Err(invalid_param(format!("weights decrease at index {}", k + 2)));
    }
    let mut acc = CompensatedSum::new();
    Ok(b.iter()
        .zip(x)
        .map(|(bk, xk)| {
            acc.add(bk * xk);
            acc.value() / bk
        })
        .collect())
}
