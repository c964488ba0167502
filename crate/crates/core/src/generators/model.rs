use std::path::Path as FsPath;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::bivariate::normal_orthant_covariance;
use super::marginal::{Cdf, Marginal};
use super::markov::MarkovChainSpec;
use crate::error::{invalid_param, Error, Result};
use crate::numeric::{compensated_mean, CompensatedSum};
use crate::rng::{stream_rng, StreamRng};

/// Dependence mechanism of a [`StationaryModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Independent draws from the marginal.
    Iid,
    /// `X_{i+1} = rho X_i + sqrt(1 - rho^2) e_{i+1}`, standard normal marginal.
    GaussianAr1 { rho: f64 },
    /// `X_t = sd * sum_k a_k e_{t-k}` with iid standard normal `e`.
    MovingAverage { coeffs: Vec<f64>, innovation_sd: f64 },
    MarkovChain(MarkovChainSpec),
    /// `X_i = X_1` for every `i`: perfect dependence.
    Frozen,
}

/// A stationary sequence: dependence mechanism plus its one-dimensional law.
///
/// Models are immutable once built and can be shared across threads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryModel {
    kind: ModelKind,
    marginal: Marginal,
    id: String,
}

/// How a covariance value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub value: f64,
    pub stderr: Option<f64>,
    pub mode: EstimateMode,
}

/// Monte Carlo settings for covariance estimates that have no closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleBudget {
    pub path_len: usize,
    pub seed: u64,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            path_len: 1 << 20,
            seed: 0x5eed,
        }
    }
}

/// A finite sample path and where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub values: Vec<f64>,
    pub seed: u64,
    pub model_id: String,
}

impl Path {
    /// A path not produced by a model (fixtures, transformed data).
    pub fn from_values(values: Vec<f64>) -> Self {
        Path {
            values,
            seed: 0,
            model_id: "external".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Single-column CSV with header `value`.
    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["value"]).map_err(csv_err)?;
        for v in &self.values {
            w.write_record([v.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl StationaryModel {
    pub fn iid(marginal: Marginal) -> Self {
        let id = format!("iid[{}]", marginal.label());
        StationaryModel {
            kind: ModelKind::Iid,
            marginal,
            id,
        }
    }

    /// Gaussian AR(1); `rho` must lie in `[0, 1)` so that the sequence is
    /// associated and stationary.
    pub fn gaussian_ar1(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid_param(format!(
                "gaussian-ar1 needs rho in [0, 1) (association constraint), got {rho}"
            )));
        }
        Ok(StationaryModel {
            kind: ModelKind::GaussianAr1 { rho },
            marginal: Marginal::standard_normal(),
            id: format!("gaussian-ar1[rho={rho}]"),
        })
    }

    /// Moving average of iid Gaussian innovations with nonnegative weights,
    /// which makes the sequence associated and `m`-dependent.
    pub fn moving_average(coeffs: Vec<f64>, innovation_sd: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid_param("moving-average needs at least one coefficient"));
        }
        if let Some(a) = coeffs.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
            return Err(invalid_param(format!(
                "moving-average coefficients must be nonnegative (association constraint), got {a}"
            )));
        }
        if !coeffs.iter().any(|a| *a > 0.0) {
            return Err(invalid_param("moving-average needs a positive coefficient"));
        }
        if !(innovation_sd > 0.0 && innovation_sd.is_finite()) {
            return Err(invalid_param(format!("innovation_sd must be positive, got {innovation_sd}")));
        }
        let var = innovation_sd * innovation_sd * coeffs.iter().map(|a| a * a).sum::<f64>();
        let id = format!("moving-average[{coeffs:?},sd={innovation_sd}]");
        Ok(StationaryModel {
            kind: ModelKind::MovingAverage { coeffs, innovation_sd },
            marginal: Marginal::normal(0.0, var.sqrt())?,
            id,
        })
    }

    pub fn markov_chain(spec: MarkovChainSpec) -> Self {
        let marginal = spec.marginal();
        let id = format!("markov-chain[{} states]", spec.states());
        StationaryModel {
            kind: ModelKind::MarkovChain(spec),
            marginal,
            id,
        }
    }

    pub fn frozen(marginal: Marginal) -> Self {
        let id = format!("frozen[{}]", marginal.label());
        StationaryModel {
            kind: ModelKind::Frozen,
            marginal,
            id,
        }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn marginal(&self) -> &Marginal {
        &self.marginal
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Whether the construction guarantees association.
    pub fn is_associated(&self) -> bool {
        !matches!(self.kind, ModelKind::MarkovChain(_))
    }

    pub fn markov_spec(&self) -> Option<&MarkovChainSpec> {
        match &self.kind {
            ModelKind::MarkovChain(spec) => Some(spec),
            _ => None,
        }
    }

    /// Largest lag with nonzero covariance, for `m`-dependent models.
    pub fn dependence_range(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Iid => Some(0),
            ModelKind::MovingAverage { coeffs, .. } => Some(coeffs.len() - 1),
            _ => None,
        }
    }

    /// `Cov(X_1, X_{1+j})` in closed form.
    pub fn analytic_gamma(&self, j: usize) -> Option<f64> {
        match &self.kind {
            ModelKind::Iid => Some(if j == 0 { self.marginal.variance() } else { 0.0 }),
            ModelKind::GaussianAr1 { rho } => Some(powi(*rho, j)),
            ModelKind::MovingAverage { coeffs, innovation_sd } => Some(ma_gamma(coeffs, *innovation_sd, j)),
            ModelKind::MarkovChain(spec) => Some(spec.covariance_table(spec.values(), j)[j]),
            ModelKind::Frozen => Some(self.marginal.variance()),
        }
    }

    /// `gamma(0..=max_lag)` of the identity observable.
    pub fn gamma_table(&self, max_lag: usize) -> Vec<f64> {
        match &self.kind {
            ModelKind::MarkovChain(spec) => spec.covariance_table(spec.values(), max_lag),
            _ => (0..=max_lag)
                .map(|j| self.analytic_gamma(j).expect("closed form available"))
                .collect(),
        }
    }

    /// Lag covariance, exact when a closed form exists and Monte Carlo
    /// otherwise.
    pub fn lag_covariance(&self, j: usize, budget: SampleBudget) -> CovarianceEstimate {
        match self.analytic_gamma(j) {
            Some(value) => CovarianceEstimate {
                value,
                stderr: None,
                mode: EstimateMode::Exact,
            },
            None => self.estimate_lag_covariance(j, budget),
        }
    }

    /// Sample autocovariance at lag `j` over one long path, with a
    /// batch-means standard error.
    pub fn estimate_lag_covariance(&self, j: usize, budget: SampleBudget) -> CovarianceEstimate {
        let path = self.sample(budget.path_len.max(j + 64), budget.seed).expect("positive length");
        sample_autocovariance(&path.values, j)
    }

    /// `H_x(j) = P(X_1 <= x, X_{1+j} <= x) - F(x)^2`.
    pub fn indicator_lag_covariance(&self, x: f64, j: usize) -> f64 {
        let f = self.marginal.cdf(x);
        if j == 0 {
            return f * (1.0 - f);
        }
        match &self.kind {
            ModelKind::Iid => 0.0,
            ModelKind::GaussianAr1 { rho } => normal_orthant_covariance(x, x, powi(*rho, j)),
            ModelKind::MovingAverage { coeffs, innovation_sd } => {
                if j >= coeffs.len() {
                    return 0.0;
                }
                let g0 = ma_gamma(coeffs, *innovation_sd, 0);
                let z = x / g0.sqrt();
                normal_orthant_covariance(z, z, ma_gamma(coeffs, *innovation_sd, j) / g0)
            }
            ModelKind::MarkovChain(spec) => {
                let w = indicator_weights(spec, x);
                spec.covariance_table(&w, j)[j]
            }
            ModelKind::Frozen => f * (1.0 - f),
        }
    }

    /// `H_x(0..=max_lag)`.
    pub fn indicator_covariance_table(&self, x: f64, max_lag: usize) -> Vec<f64> {
        match &self.kind {
            ModelKind::MarkovChain(spec) => spec.covariance_table(&indicator_weights(spec, x), max_lag),
            ModelKind::GaussianAr1 { rho } => {
                let f = self.marginal.cdf(x);
                let mut out = vec![f * (1.0 - f)];
                let mut r = 1.0;
                for _ in 1..=max_lag {
                    r *= rho;
                    // below this the covariance is under 1e-300 for every x
                    out.push(if r < 1e-300 { 0.0 } else { normal_orthant_covariance(x, x, r) });
                }
                out
            }
            _ => (0..=max_lag).map(|j| self.indicator_lag_covariance(x, j)).collect(),
        }
    }

    /// Monte Carlo estimate of `H_x(j)`.
    pub fn estimate_indicator_lag_covariance(&self, x: f64, j: usize, budget: SampleBudget) -> CovarianceEstimate {
        let path = self.sample(budget.path_len.max(j + 64), budget.seed).expect("positive length");
        let ind: Vec<f64> = path.values.iter().map(|v| if *v <= x { 1.0 } else { 0.0 }).collect();
        sample_autocovariance(&ind, j)
    }

    /// `Cov(F(X_1), F(X_{1+j}))` for `j = 0..=max_lag`: the lag covariance of
    /// the probability-integral-transformed sequence.
    pub fn pit_covariance_table(&self, max_lag: usize) -> Vec<f64> {
        let gaussian = |corr: f64| (0.5 * corr).asin() / (2.0 * std::f64::consts::PI);
        let var_f = pit_variance(&self.marginal);
        match &self.kind {
            ModelKind::Iid => (0..=max_lag).map(|j| if j == 0 { var_f } else { 0.0 }).collect(),
            ModelKind::GaussianAr1 { rho } => (0..=max_lag)
                .map(|j| if j == 0 { var_f } else { gaussian(powi(*rho, j)) })
                .collect(),
            ModelKind::MovingAverage { coeffs, innovation_sd } => {
                let g0 = ma_gamma(coeffs, *innovation_sd, 0);
                (0..=max_lag)
                    .map(|j| match j {
                        0 => var_f,
                        j if j >= coeffs.len() => 0.0,
                        j => gaussian(ma_gamma(coeffs, *innovation_sd, j) / g0),
                    })
                    .collect()
            }
            ModelKind::MarkovChain(spec) => {
                let w: Vec<f64> = spec.values().iter().map(|v| self.marginal.cdf(*v)).collect();
                spec.covariance_table(&w, max_lag)
            }
            ModelKind::Frozen => vec![var_f; max_lag + 1],
        }
    }

    /// Stationary path of length `n`, deterministic in `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Path> {
        self.sample_stream(n, seed, 0)
    }

    /// Path drawn from stream `stream` of `seed`; replicate `r` of a study
    /// uses stream `r`.
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Result<Path> {
        if n == 0 {
            return Err(invalid_param("path length must be at least 1"));
        }
        let mut rng = stream_rng(seed, stream);
        Ok(Path {
            values: self.draw(n, &mut rng),
            seed,
            model_id: self.id.clone(),
        })
    }

    fn draw(&self, n: usize, rng: &mut StreamRng) -> Vec<f64> {
        match &self.kind {
            ModelKind::Iid => (0..n).map(|_| self.marginal.sample(rng)).collect(),
            ModelKind::GaussianAr1 { rho } => {
                let scale = (1.0 - rho * rho).sqrt();
                let mut x: f64 = rng.sample(StandardNormal);
                let mut out = Vec::with_capacity(n);
                out.push(x);
                for _ in 1..n {
                    let e: f64 = rng.sample(StandardNormal);
                    x = rho * x + scale * e;
                    out.push(x);
                }
                out
            }
            ModelKind::MovingAverage { coeffs, innovation_sd } => {
                let m = coeffs.len() - 1;
                let innovations: Vec<f64> = (0..n + m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                (0..n)
                    .map(|i| {
                        let t = i + m;
                        innovation_sd * coeffs.iter().enumerate().map(|(k, a)| a * innovations[t - k]).sum::<f64>()
                    })
                    .collect()
            }
            ModelKind::MarkovChain(spec) => spec
                .sample_states(n, rng)
                .into_iter()
                .map(|s| spec.values()[s])
                .collect(),
            ModelKind::Frozen => vec![self.marginal.sample(rng); n],
        }
    }
}

fn powi(base: f64, exp: usize) -> f64 {
    base.powi(exp.min(i32::MAX as usize) as i32)
}

fn ma_gamma(coeffs: &[f64], sd: f64, j: usize) -> f64 {
    if j >= coeffs.len() {
        return 0.0;
    }
    sd * sd * coeffs.iter().zip(&coeffs[j..]).map(|(a, b)| a * b).sum::<f64>()
}

fn indicator_weights(spec: &MarkovChainSpec, x: f64) -> Vec<f64> {
    spec.values().iter().map(|v| if *v <= x { 1.0 } else { 0.0 }).collect()
}

/// `Var(F(X))`: 1/12 for continuous laws, smaller when `F` has atoms.
fn pit_variance(marginal: &Marginal) -> f64 {
    match marginal {
        Marginal::Uniform { .. } | Marginal::Normal { .. } => 1.0 / 12.0,
        Marginal::PointMass { .. } => 0.0,
        Marginal::Discrete { values, probs } => {
            let f: Vec<f64> = values.iter().map(|v| marginal.cdf(*v)).collect();
            let mean: f64 = f.iter().zip(probs).map(|(a, p)| a * p).sum();
            f.iter().zip(probs).map(|(a, p)| p * (a - mean) * (a - mean)).sum()
        }
    }
}

const BATCHES: usize = 20;

fn sample_autocovariance(values: &[f64], j: usize) -> CovarianceEstimate {
    let mean = compensated_mean(values);
    let products: Vec<f64> = values
        .iter()
        .zip(&values[j..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .collect();
    let value = compensated_mean(&products);
    let batch = products.len() / BATCHES;
    let stderr = if batch >= 2 {
        let means: Vec<f64> = products.chunks_exact(batch).take(BATCHES).map(compensated_mean).collect();
        let mb = compensated_mean(&means);
        let mut ss = CompensatedSum::new();
        ss.extend(means.iter().map(|m| (m - mb) * (m - mb)));
        Some((ss.value() / (BATCHES as f64 - 1.0) / BATCHES as f64).sqrt())
    } else {
        None
    };
    CovarianceEstimate {
        value,
        stderr,
        mode: EstimateMode::MonteCarlo,
    }
}
