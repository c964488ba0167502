//! Covariance inequalities for associated and φ-mixing pairs, checked on
//! joint laws that can be evaluated exactly (bivariate Gaussian orthants,
//! finite joint tables, lagged Markov pairs) or by Monte Carlo.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::empirical::Observable;
use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::generators::{normal_orthant_covariance, MarkovChainSpec, EstimateMode};
use crate::numeric::{golden_section_min, std_normal_pdf, CompensatedSum};
use crate::rng::stream_rng;

/// Slack for exact-mode comparisons.
pub const EXACT_TOL: f64 = 1e-10;
/// Monte Carlo standard errors allowed above the bound.
pub const MC_SIGMAS: f64 = 3.0;

/// A pair `(X, Y)` whose joint law is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BivariatePair {
    /// Standard normal marginals with correlation `rho` in `[0, 1]`;
    /// `rho = 1` is the pair `X = Y`.
    Gaussian { rho: f64 },
    /// `probs[i][j] = P(X = xs[i], Y = ys[j])`.
    FiniteJoint {
        xs: Vec<f64>,
        ys: Vec<f64>,
        probs: Vec<Vec<f64>>,
    },
    /// `(X_1, X_{1+lag})` of a stationary chain.
    ChainLag { spec: MarkovChainSpec, lag: usize },
}

impl BivariatePair {
    pub fn gaussian(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid_param(format!(
                "gaussian pair needs rho in [0, 1] (association regime), got {rho}"
            )));
        }
        Ok(BivariatePair::Gaussian { rho })
    }

    pub fn finite_joint(xs: Vec<f64>, ys: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != xs.len() || probs.iter().any(|row| row.len() != ys.len()) {
            return Err(invalid_input(format!(
                "joint table must be {} x {}",
                xs.len(),
                ys.len()
            )));
        }
        if probs.iter().flatten().any(|p| !(*p >= 0.0)) {
            return Err(invalid_input("joint table has a negative or NaN entry"));
        }
        let total: f64 = probs.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid_input(format!("joint table sums to {total}, not 1")));
        }
        Ok(BivariatePair::FiniteJoint { xs, ys, probs })
    }

    /// Independent pair built from two marginal tables.
    pub fn independent(xs: Vec<f64>, px: &[f64], ys: Vec<f64>, py: &[f64]) -> Result<Self> {
        let probs = px.iter().map(|a| py.iter().map(|b| a * b).collect()).collect();
        Self::finite_joint(xs, ys, probs)
    }

    pub fn chain_lag(spec: MarkovChainSpec, lag: usize) -> Self {
        BivariatePair::ChainLag { spec, lag }
    }

    pub fn label(&self) -> String {
        match self {
            BivariatePair::Gaussian { rho } => format!("gaussian(rho={rho})"),
            BivariatePair::FiniteJoint { xs, ys, .. } => format!("finite-joint({}x{})", xs.len(), ys.len()),
            BivariatePair::ChainLag { spec, lag } => format!("chain-lag({} states, lag={lag})", spec.states()),
        }
    }

    /// Largest marginal density, when both marginals have one.
    pub fn density_bound(&self) -> Option<f64> {
        match self {
            BivariatePair::Gaussian { .. } => Some(std_normal_pdf(0.0)),
            _ => None,
        }
    }

    /// `Cov(X, Y)`.
    pub fn exact_cov(&self) -> f64 {
        match self {
            BivariatePair::Gaussian { rho } => *rho,
            _ => self
                .cov_of(&Observable::identity(), &Observable::identity())
                .expect("tables and chains are exact"),
        }
    }

    /// `Cov(f(X), g(Y))` when it can be computed exactly.
    pub fn cov_of(&self, f: &Observable, g: &Observable) -> Option<f64> {
        match self {
            BivariatePair::Gaussian { rho } => (f.is_identity() && g.is_identity()).then_some(*rho),
            BivariatePair::FiniteJoint { xs, ys, probs } => {
                let fx: Vec<f64> = xs.iter().map(|x| f.eval(*x)).collect();
                let gy: Vec<f64> = ys.iter().map(|y| g.eval(*y)).collect();
                let px: Vec<f64> = probs.iter().map(|row| row.iter().sum()).collect();
                let py: Vec<f64> = (0..ys.len()).map(|j| probs.iter().map(|row| row[j]).sum()).collect();
                let ef: f64 = fx.iter().zip(&px).map(|(v, p)| v * p).sum();
                let eg: f64 = gy.iter().zip(&py).map(|(v, p)| v * p).sum();
                let mut acc = CompensatedSum::new();
                for (i, row) in probs.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        acc.add(p * (fx[i] - ef) * (gy[j] - eg));
                    }
                }
                Some(acc.value())
            }
            BivariatePair::ChainLag { spec, lag } => {
                let fv: Vec<f64> = spec.values().iter().map(|v| f.eval(*v)).collect();
                let gv: Vec<f64> = spec.values().iter().map(|v| g.eval(*v)).collect();
                Some(spec.cross_covariance(&fv, &gv, *lag))
            }
        }
    }

    /// `H(x, y) = P(X <= x, Y <= y) - P(X <= x) P(Y <= y)`.
    pub fn h(&self, x: f64, y: f64) -> f64 {
        match self {
            BivariatePair::Gaussian { rho } => normal_orthant_covariance(x, y, *rho),
            BivariatePair::FiniteJoint { xs, ys, probs } => {
                let mut joint = CompensatedSum::new();
                let mut fx = CompensatedSum::new();
                let mut fy = CompensatedSum::new();
                for (i, row) in probs.iter().enumerate() {
                    for (j, p) in row.iter().enumerate() {
                        let (a, b) = (xs[i] <= x, ys[j] <= y);
                        if a && b {
                            joint.add(*p);
                        }
                        if a {
                            fx.add(*p);
                        }
                        if b {
                            fy.add(*p);
                        }
                    }
                }
                joint.value() - fx.value() * fy.value()
            }
            BivariatePair::ChainLag { spec, lag } => {
                let ix: Vec<f64> = spec.values().iter().map(|v| f64::from(u8::from(*v <= x))).collect();
                let iy: Vec<f64> = spec.values().iter().map(|v| f64::from(u8::from(*v <= y))).collect();
                spec.cross_covariance(&ix, &iy, *lag)
            }
        }
    }

    /// `n` draws of the Gaussian pair:
    /// `X = Z_1`, `Y = rho Z_1 + sqrt(1 - rho^2) Z_2`.
    fn sample_gaussian(rho: f64, n: usize, seed: u64, stream: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = stream_rng(seed, stream);
        let s = (1.0 - rho * rho).max(0.0).sqrt();
        (0..n)
            .map(|_| {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                (z1, rho * z1 + s * z2)
            })
            .unzip()
    }
}

/// Outcome of one inequality check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub inequality_id: String,
    pub inputs: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub stderr: Option<f64>,
    pub holds: bool,
    pub mode: EstimateMode,
}

impl InequalityVerdict {
    fn exact(id: &str, inputs: BTreeMap<String, Value>, lhs: f64, rhs: f64) -> Self {
        InequalityVerdict {
            inequality_id: id.to_string(),
            inputs,
            lhs,
            rhs,
            margin: rhs - lhs,
            stderr: None,
            holds: lhs <= rhs + EXACT_TOL,
            mode: EstimateMode::Exact,
        }
    }

    fn estimated(id: &str, inputs: BTreeMap<String, Value>, lhs: f64, rhs: f64, stderr: f64) -> Self {
        InequalityVerdict {
            inequality_id: id.to_string(),
            inputs,
            lhs,
            rhs,
            margin: rhs - lhs,
            stderr: Some(stderr),
            holds: lhs <= rhs + MC_SIGMAS * stderr,
            mode: EstimateMode::MonteCarlo,
        }
    }
}

/// Monte Carlo settings for checks without a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McBudget {
    pub samples: usize,
    pub seed: u64,
    pub stream: u64,
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget {
            samples: 1_000_000,
            seed: 0x1e55,
            stream: 0,
        }
    }
}

fn base_inputs(pair: &BivariatePair) -> BTreeMap<String, Value> {
    BTreeMap::from([("pair".to_string(), json!(pair.label()))])
}

fn require_associated(pair: &BivariatePair) -> Result<f64> {
    let cov = pair.exact_cov();
    if cov < -EXACT_TOL {
        return Err(Error::NotApplicable(format!(
            "{} has Cov(X, Y) = {cov} < 0",
            pair.label()
        )));
    }
    Ok(cov)
}

/// Sample covariance of paired values and the standard error of the mean
/// of centred products.
fn sample_cov(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let mean = prods.iter().sum::<f64>() / n;
    let var = prods.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Newman: `|Cov(f(X), g(Y))| <= ||f'|| ||g'|| Cov(X, Y)` for associated
/// `(X, Y)`. `bf` and `bg` are the caller's derivative bounds.
///
/// Exact for tables, chains and affine observables of the Gaussian pair;
/// Monte Carlo otherwise.
pub fn check_newman(
    pair: &BivariatePair,
    f: &Observable,
    bf: f64,
    g: &Observable,
    bg: f64,
    budget: McBudget,
) -> Result<InequalityVerdict> {
    if !(bf >= 0.0 && bg >= 0.0) {
        return Err(invalid_param("derivative bounds must be nonnegative"));
    }
    let cov = require_associated(pair)?;
    let rhs = bf * bg * cov;
    let mut inputs = base_inputs(pair);
    inputs.insert("f".into(), json!(f.label()));
    inputs.insert("g".into(), json!(g.label()));
    inputs.insert("bound_f".into(), json!(bf));
    inputs.insert("bound_g".into(), json!(bg));
    if let Some(c) = pair.cov_of(f, g) {
        return Ok(InequalityVerdict::exact("newman", inputs, c.abs(), rhs));
    }
    let BivariatePair::Gaussian { rho } = pair else {
        unreachable!("tables and chains are exact");
    };
    if budget.samples < 2 {
        return Err(invalid_param("Monte Carlo needs at least 2 samples"));
    }
    let (xs, ys) = BivariatePair::sample_gaussian(*rho, budget.samples, budget.seed, budget.stream);
    let fx: Vec<f64> = xs.iter().map(|x| f.eval(*x)).collect();
    let gy: Vec<f64> = ys.iter().map(|y| g.eval(*y)).collect();
    let (c, se) = sample_cov(&fx, &gy);
    inputs.insert("samples".into(), json!(budget.samples));
    inputs.insert("seed".into(), json!(budget.seed));
    Ok(InequalityVerdict::estimated("newman", inputs, c.abs(), rhs, se))
}

/// `M* = max(2 / pi^2, 45 M)`.
pub fn m_star(m: f64) -> f64 {
    (2.0 / (PI * PI)).max(45.0 * m)
}

fn check_density_bound(pair: &BivariatePair, m: f64) -> Result<()> {
    match pair.density_bound() {
        None => Err(Error::NotApplicable(format!(
            "{} has no bounded marginal densities",
            pair.label()
        ))),
        Some(b) if m < b * (1.0 - 1e-12) => Err(invalid_param(format!(
            "density bound M = {m} is below the actual bound {b}"
        ))),
        Some(_) => Ok(()),
    }
}

/// `H(x, y) <= M* (T^2 Cov(X, Y) + 1/T)`.
pub fn check_indicator_cov_bound(pair: &BivariatePair, x: f64, y: f64, t: f64, m: f64) -> Result<InequalityVerdict> {
    if !(t > 0.0) {
        return Err(invalid_param(format!("T must be positive, got {t}")));
    }
    check_density_bound(pair, m)?;
    let cov = require_associated(pair)?;
    let ms = m_star(m);
    let mut inputs = base_inputs(pair);
    inputs.insert("x".into(), json!(x));
    inputs.insert("y".into(), json!(y));
    inputs.insert("T".into(), json!(t));
    inputs.insert("M".into(), json!(m));
    inputs.insert("M_star".into(), json!(ms));
    Ok(InequalityVerdict::exact(
        "indicator-cov-bound",
        inputs,
        pair.h(x, y),
        ms * (t * t * cov + 1.0 / t),
    ))
}

/// Which constant multiplies `Cov^(1/3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMode {
    /// `1 / M*` as stated.
    Nominal,
    /// `min_T M*(T^2 C + 1/T)`, which equals `3 M* (C/4)^(1/3)`.
    Optimized,
}

/// `min_T M* (T^2 C + 1/T)` by golden section on `ln T`.
pub fn optimized_indicator_bound(m: f64, cov: f64) -> (f64, f64) {
    let ms = m_star(m);
    let (u, value) = golden_section_min(|u: f64| ms * ((2.0 * u).exp() * cov + (-u).exp()), -40.0, 40.0, 1e-13);
    (u.exp(), value)
}

/// `H(x, y) <= c Cov(X, Y)^(1/3)` with the constant chosen by `mode`.
pub fn check_cov_one_third(
    pair: &BivariatePair,
    x: f64,
    y: f64,
    m: f64,
    mode: ConstantMode,
) -> Result<InequalityVerdict> {
    check_density_bound(pair, m)?;
    let cov = pair.exact_cov();
    if !(cov > 0.0) {
        return Err(Error::NotApplicable(format!(
            "{} needs Cov(X, Y) > 0, got {cov}",
            pair.label()
        )));
    }
    let ms = m_star(m);
    let c_nominal = 1.0 / ms;
    let c_opt = 3.0 * ms / 4f64.cbrt();
    let (t_opt, min_value) = optimized_indicator_bound(m, cov);
    let rhs = match mode {
        ConstantMode::Nominal => c_nominal * cov.cbrt(),
        ConstantMode::Optimized => min_value,
    };
    let mut inputs = base_inputs(pair);
    inputs.insert("x".into(), json!(x));
    inputs.insert("y".into(), json!(y));
    inputs.insert("M".into(), json!(m));
    inputs.insert("constant_mode".into(), json!(mode));
    inputs.insert("c_nominal".into(), json!(c_nominal));
    inputs.insert("c_optimized".into(), json!(c_opt));
    inputs.insert("T_optimal".into(), json!(t_opt));
    Ok(InequalityVerdict::exact("cov-one-third", inputs, pair.h(x, y), rhs))
}

/// `sup_grid |H(x, y)| <= c M^(2/3) Cov^(1/3)`; `inputs["ratio"]` carries
/// `lhs / (M^(2/3) Cov^(1/3))` for calibrating `c`.
pub fn check_bagai_prakasa(
    pair: &BivariatePair,
    xs: &[f64],
    ys: &[f64],
    m: f64,
    c: f64,
) -> Result<InequalityVerdict> {
    if !(c > 0.0) {
        return Err(invalid_param(format!("constant c must be positive, got {c}")));
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(invalid_input("grid is empty"));
    }
    check_density_bound(pair, m)?;
    let cov = pair.exact_cov();
    if cov < 0.0 {
        return Err(Error::NotApplicable(format!(
            "{} has Cov(X, Y) = {cov} < 0",
            pair.label()
        )));
    }
    let (lhs, at) = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| (pair.h(*x, *y).abs(), (*x, *y)))
                .fold((0.0, (xs[0], ys[0])), |a, b| if b.0 > a.0 { b } else { a })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, (xs[0], ys[0])), |a, b| if b.0 > a.0 { b } else { a });
    let scale = m.powf(2.0 / 3.0) * cov.cbrt();
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / scale };
    let mut inputs = base_inputs(pair);
    inputs.insert("M".into(), json!(m));
    inputs.insert("c".into(), json!(c));
    inputs.insert("grid_points".into(), json!(xs.len() * ys.len()));
    inputs.insert("argmax".into(), json!([at.0, at.1]));
    inputs.insert("ratio".into(), json!(ratio));
    Ok(InequalityVerdict::exact("bagai-prakasa", inputs, lhs, c * scale))
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Largest Bagai–Prakasa Rao ratio over a family of Gaussian pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BagaiCalibration {
    pub rhos: Vec<f64>,
    pub ratios: Vec<f64>,
    pub c_hat: f64,
}

pub fn calibrate_bagai_constant(rhos: &[f64], xs: &[f64], ys: &[f64]) -> Result<BagaiCalibration> {
    let m = std_normal_pdf(0.0);
    let ratios = rhos
        .iter()
        .map(|rho| {
            let v = check_bagai_prakasa(&BivariatePair::gaussian(*rho)?, xs, ys, m, 1.0)?;
            Ok(v.inputs["ratio"].as_f64().expect("ratio is numeric"))
        })
        .collect::<Result<Vec<f64>>>()?;
    let c_hat = ratios.iter().copied().fold(0.0, f64::max);
    Ok(BagaiCalibration {
        rhos: rhos.to_vec(),
        ratios,
        c_hat,
    })
}

/// `|Cov(f(X_1), g(X_{1+lag}))| <= 2 phi(lag)^(1/p) ||f(X)||_p ||g(X)||_q`
/// with `1/p + 1/q = 1`.
pub fn check_phi_covariance(
    spec: &MarkovChainSpec,
    lag: usize,
    f: &Observable,
    g: &Observable,
    p: f64,
) -> Result<InequalityVerdict> {
    if !(p > 1.0) {
        return Err(invalid_param(format!("Hölder exponent p must exceed 1, got {p}")));
    }
    if lag == 0 {
        return Err(invalid_param("lag must be positive"));
    }
    let q = p / (p - 1.0);
    let pi = spec.stationary();
    let fv: Vec<f64> = spec.values().iter().map(|v| f.eval(*v)).collect();
    let gv: Vec<f64> = spec.values().iter().map(|v| g.eval(*v)).collect();
    let norm = |w: &[f64], e: f64| {
        w.iter()
            .zip(pi)
            .map(|(v, p)| p * v.abs().powf(e))
            .sum::<f64>()
            .powf(1.0 / e)
    };
    let phi = spec.phi_mixing_profile(lag)[lag - 1];
    let lhs = spec.cross_covariance(&fv, &gv, lag).abs();
    let rhs = 2.0 * phi.powf(1.0 / p) * norm(&fv, p) * norm(&gv, q);
    let inputs = BTreeMap::from([
        ("chain_states".to_string(), json!(spec.states())),
        ("lag".to_string(), json!(lag)),
        ("f".to_string(), json!(f.label())),
        ("g".to_string(), json!(g.label())),
        ("p".to_string(), json!(p)),
        ("q".to_string(), json!(q)),
        ("phi".to_string(), json!(phi)),
    ]);
    Ok(InequalityVerdict::exact("phi-covariance", inputs, lhs, rhs))
}

/// Smooth observables with known derivative bounds, used for random
/// Newman trials.
fn smooth_observable(kind: u32, scale: f64) -> (Observable, f64) {
    match kind {
        0 => (Observable::new(format!("tanh({scale}x)"), move |x| (scale * x).tanh()), scale),
        1 => (Observable::new(format!("sin({scale}x)"), move |x| (scale * x).sin()), scale),
        2 => (Observable::new(format!("atan({scale}x)"), move |x| (scale * x).atan()), scale),
        _ => (
            Observable::new(format!("x+sin({scale}x)/2"), move |x| x + 0.5 * (scale * x).sin()),
            1.0 + 0.5 * scale,
        ),
    }
}

/// Newman checks on `trials` random Gaussian pairs and smooth observables,
/// each with its own random stream.
pub fn newman_gaussian_trials(trials: usize, samples: usize, seed: u64) -> Result<Vec<InequalityVerdict>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, 2 * t as u64);
            let rho: f64 = rng.random_range(0.0..1.0);
            let (f, bf) = smooth_observable(rng.random_range(0..4), rng.random_range(0.2..2.0));
            let (g, bg) = smooth_observable(rng.random_range(0..4), rng.random_range(0.2..2.0));
            let budget = McBudget {
                samples,
                seed,
                stream: 2 * t as u64 + 1,
            };
            check_newman(&BivariatePair::gaussian(rho)?, &f, bf, &g, bg, budget)
        })
        .collect()
}

/// The two-state chain with `P = [[0.9, 0.1], [0.2, 0.8]]` on values
/// `{0, 1}`.
pub fn two_state_chain() -> MarkovChainSpec {
    MarkovChainSpec::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![0.0, 1.0]).expect("valid chain")
}

/// Bundled checks. `verdicts` are expected to hold; `informational`
/// records checks whose outcome is reported but not asserted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub verdicts: Vec<InequalityVerdict>,
    pub informational: Vec<InequalityVerdict>,
    pub bagai_calibration: BagaiCalibration,
}

impl BatteryReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// Sizes for [`inequality_battery`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatterySize {
    pub mc_samples: usize,
    pub bagai_grid: usize,
    pub phi_max_lag: usize,
}

impl Default for BatterySize {
    fn default() -> Self {
        BatterySize {
            mc_samples: 200_000,
            bagai_grid: 101,
            phi_max_lag: 50,
        }
    }
}

pub fn inequality_battery(seed: u64, size: BatterySize) -> Result<BatteryReport> {
    let mut verdicts = Vec::new();
    let mut informational = Vec::new();
    let m = std_normal_pdf(0.0);
    let id = Observable::identity();
    let tanh = Observable::new("tanh(x)", f64::tanh);

    // Newman
    for (k, rho) in [0.0, 0.25, 0.5, 0.9, 1.0].into_iter().enumerate() {
        let pair = BivariatePair::gaussian(rho)?;
        verdicts.push(check_newman(&pair, &id, 1.0, &id, 1.0, McBudget::default())?);
        let budget = McBudget {
            samples: size.mc_samples,
            seed,
            stream: k as u64 + 1,
        };
        verdicts.push(check_newman(&pair, &tanh, 1.0, &tanh, 1.0, budget)?);
    }
    let chain = two_state_chain();
    let three = MarkovChainSpec::new(
        vec![vec![0.7, 0.2, 0.1], vec![0.2, 0.6, 0.2], vec![0.1, 0.2, 0.7]],
        vec![-1.0, 0.0, 1.0],
    )?;
    for lag in [1, 2, 5] {
        verdicts.push(check_newman(
            &BivariatePair::chain_lag(chain.clone(), lag),
            &tanh,
            1.0,
            &tanh,
            1.0,
            McBudget::default(),
        )?);
    }
    let comonotone = BivariatePair::finite_joint(
        vec![0.0, 1.0, 2.0],
        vec![0.0, 1.0, 2.0],
        vec![vec![0.3, 0.05, 0.0], vec![0.05, 0.2, 0.05], vec![0.0, 0.05, 0.3]],
    )?;
    verdicts.push(check_newman(&comonotone, &tanh, 1.0, &id, 1.0, McBudget::default())?);
    let independent = BivariatePair::independent(vec![0.0, 1.0], &[0.4, 0.6], vec![-1.0, 2.0], &[0.5, 0.5])?;
    verdicts.push(check_newman(&independent, &id, 1.0, &id, 1.0, McBudget::default())?);

    // indicator covariance bound and its T-optimised form
    for rho in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let pair = BivariatePair::gaussian(rho)?;
        for (x, y) in [(-1.0, -1.0), (0.0, 0.0), (0.5, -0.5), (1.0, 1.0)] {
            for t in [0.5, 1.0, 2.0] {
                verdicts.push(check_indicator_cov_bound(&pair, x, y, t, m)?);
            }
        }
    }
    for rho in [0.001, 0.01, 0.1, 0.25, 0.5, 0.9] {
        let pair = BivariatePair::gaussian(rho)?;
        verdicts.push(check_cov_one_third(&pair, 0.0, 0.0, m, ConstantMode::Optimized)?);
        informational.push(check_cov_one_third(&pair, 0.0, 0.0, m, ConstantMode::Nominal)?);
    }

    // Bagai–Prakasa Rao on the [-4, 4]^2 grid
    let grid = uniform_grid(-4.0, 4.0, size.bagai_grid);
    verdicts.push(check_bagai_prakasa(&BivariatePair::gaussian(0.5)?, &grid, &grid, m, 1.0)?);
    let rhos: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let coarse = uniform_grid(-4.0, 4.0, size.bagai_grid.min(41));
    let bagai_calibration = calibrate_bagai_constant(&rhos, &coarse, &coarse)?;

    // phi-mixing covariance inequality
    for lag in 1..=size.phi_max_lag {
        verdicts.push(check_phi_covariance(&chain, lag, &id, &id, 2.0)?);
    }
    for (lag, p) in [(1, 1.5), (2, 3.0), (4, 2.0)] {
        verdicts.push(check_phi_covariance(&three, lag, &id, &tanh, p)?);
    }

    Ok(BatteryReport {
        seed,
        verdicts,
        informational,
        bagai_calibration,
    })
}
