//! Experiment specifications and the runners behind each report:
//! convergence studies, condition suites, entropy summaries and the
//! inequality battery.
//!
//! Every run is a pure function of its [`ExperimentSpec`]. Replicates use
//! the stream `(seed, replicate index)` and are merged by index, so
//! outputs do not depend on the number of worker threads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{
    assoc_cesaro_with, gcep_indicator_conditions, gcip_c1, gcip_c2, long_run_variance,
    phi_decay_check, CesaroThresholds, ConditionReport, GcepReport, GcipParams, LagCovariance, LongRunVariance,
    Verdict, VerdictThresholds,
};
use crate::empirical::{run_gc_diagnostic, DeviationPath};
use crate::entropy::{
    halfline_entropy_report, vc_index, BoundParams, BracketNorm, ClosedIntervals, EntropyReport, HalfLines,
    ProbeBudget, VcReport,
};
use crate::error::{invalid_param, Error, Result};
use crate::generators::{Marginal, MarkovChainSpec, StationaryModel};
use crate::inequalities::{inequality_battery, newman_gaussian_trials, BatteryReport, BatterySize};
use crate::numeric::{log_log_fit, SlopeFit};

/// One-dimensional law, as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MarginalSpec {
    Uniform {
        #[serde(default)]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
    Normal {
        #[serde(default)]
        mean: f64,
        #[serde(default = "one")]
        sd: f64,
    },
    PointMass { value: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Default for MarginalSpec {
    fn default() -> Self {
        MarginalSpec::Uniform { lo: 0.0, hi: 1.0 }
    }
}

impl MarginalSpec {
    pub fn build(&self) -> Result<Marginal> {
        match self {
            MarginalSpec::Uniform { lo, hi } => Marginal::uniform(*lo, *hi),
            MarginalSpec::Normal { mean, sd } => Marginal::normal(*mean, *sd),
            MarginalSpec::PointMass { value } => Marginal::point_mass(*value),
            MarginalSpec::Discrete { values, probs } => Marginal::discrete(values, probs),
        }
    }
}

/// Model section of a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Iid {
        #[serde(default)]
        marginal: MarginalSpec,
    },
    GaussianAr1 {
        rho: f64,
    },
    MovingAverage {
        coeffs: Vec<f64>,
        #[serde(default = "one")]
        innovation_sd: f64,
    },
    MarkovChain {
        transition: Vec<Vec<f64>>,
        values: Vec<f64>,
    },
    Frozen {
        #[serde(default)]
        marginal: MarginalSpec,
    },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Iid {
            marginal: MarginalSpec::default(),
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<StationaryModel> {
        match self {
            ModelSpec::Iid { marginal } => Ok(StationaryModel::iid(marginal.build()?)),
            ModelSpec::GaussianAr1 { rho } => StationaryModel::gaussian_ar1(*rho),
            ModelSpec::MovingAverage { coeffs, innovation_sd } => {
                StationaryModel::moving_average(coeffs.clone(), *innovation_sd)
            }
            ModelSpec::MarkovChain { transition, values } => Ok(StationaryModel::markov_chain(
                MarkovChainSpec::new(transition.clone(), values.clone())?,
            )),
            ModelSpec::Frozen { marginal } => Ok(StationaryModel::frozen(marginal.build()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSpec {
    pub n_grid: Vec<usize>,
    pub reps: usize,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        SimulateSpec {
            n_grid: (6..=14).map(|k| 1usize << k).collect(),
            reps: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionsSpec {
    /// Primary `delta` for the indicator conditions and headline verdicts.
    pub delta: f64,
    pub delta_grid: Vec<f64>,
    pub q_max: usize,
    /// Marginal quantile levels defining the `x` grid.
    pub x_quantiles: Vec<f64>,
    /// Explicit `x` grid; overrides `x_quantiles` when present.
    pub x_grid: Option<Vec<f64>>,
    pub cesaro_q_max: usize,
    pub phi_delta_grid: Vec<f64>,
    pub r_max: usize,
    pub long_run_truncation: usize,
    pub bounded_slope: f64,
    pub diverging_slope: f64,
    pub cesaro_slope: f64,
    pub cesaro_level: f64,
}

impl Default for ConditionsSpec {
    fn default() -> Self {
        ConditionsSpec {
            delta: 1.0,
            delta_grid: vec![0.5, 1.0, 1.5, 2.0, 2.5],
            q_max: 1000,
            x_quantiles: (0..21).map(|k| 0.025 + 0.0475 * k as f64).collect(),
            x_grid: None,
            cesaro_q_max: 1000,
            phi_delta_grid: (1..=9).map(|k| k as f64 / 10.0).collect(),
            r_max: 400,
            long_run_truncation: 200,
            bounded_slope: 0.05,
            diverging_slope: 0.2,
            cesaro_slope: -0.2,
            cesaro_level: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySpec {
    pub epsilons: Vec<f64>,
    pub norm: BracketNorm,
    /// Law used for the half-line brackets; defaults to the model marginal
    /// when continuous and to Uniform(0, 1) otherwise.
    pub marginal: Option<MarginalSpec>,
    pub bound_k: f64,
    pub bound_r: f64,
    pub max_cardinality: usize,
    pub random_configs: usize,
}

impl Default for EntropySpec {
    fn default() -> Self {
        EntropySpec {
            epsilons: vec![0.5, 0.1, 0.01],
            norm: BracketNorm::L1,
            marginal: None,
            bound_k: crate::entropy::DEFAULT_BOUND_K,
            bound_r: crate::entropy::DEFAULT_BOUND_R,
            max_cardinality: 8,
            random_configs: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalitiesSpec {
    pub mc_samples: usize,
    pub bagai_grid: usize,
    pub phi_max_lag: usize,
    pub newman_trials: usize,
    pub newman_samples: usize,
}

impl Default for InequalitiesSpec {
    fn default() -> Self {
        let size = BatterySize::default();
        InequalitiesSpec {
            mc_samples: size.mc_samples,
            bagai_grid: size.bagai_grid,
            phi_max_lag: size.phi_max_lag,
            newman_trials: 1000,
            newman_samples: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: "out".into() }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// A complete experiment: model, grids, seed and output location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub simulate: SimulateSpec,
    #[serde(default)]
    pub conditions: ConditionsSpec,
    #[serde(default)]
    pub entropy: EntropySpec,
    #[serde(default)]
    pub inequalities: InequalitiesSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            seed: DEFAULT_SEED,
            model: ModelSpec::default(),
            simulate: SimulateSpec::default(),
            conditions: ConditionsSpec::default(),
            entropy: EntropySpec::default(),
            inequalities: InequalitiesSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

fn key_err(key: &str, msg: impl std::fmt::Display) -> Error {
    invalid_param(format!("{key}: {msg}"))
}

fn strictly_increasing<T: PartialOrd + Copy + std::fmt::Debug>(key: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(key_err(key, "grid must be nonempty"));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(key_err(key, format!("grid must be sorted ascending, {:?} >= {:?}", w[0], w[1])));
    }
    Ok(())
}

impl ExperimentSpec {
    /// Checks every documented constraint; messages start with the key.
    pub fn validate(&self) -> Result<()> {
        self.model
            .build()
            .map_err(|e| key_err("model", e.to_string().trim_start_matches("invalid parameter: ")))?;

        let s = &self.simulate;
        strictly_increasing("simulate.n_grid", &s.n_grid)?;
        if s.n_grid[0] == 0 {
            return Err(key_err("simulate.n_grid", "sample sizes must be positive"));
        }
        if s.reps == 0 {
            return Err(key_err("simulate.reps", "replicate count must be at least 1"));
        }

        let c = &self.conditions;
        let delta_ok = |d: f64| d > 0.0 && d < 3.0;
        if !delta_ok(c.delta) {
            return Err(key_err("conditions.delta", format!("delta ∈ (0,3) required, got {}", c.delta)));
        }
        strictly_increasing("conditions.delta_grid", &c.delta_grid)?;
        if let Some(d) = c.delta_grid.iter().find(|d| !delta_ok(**d)) {
            return Err(key_err("conditions.delta_grid", format!("delta ∈ (0,3) required, got {d}")));
        }
        if c.q_max < 4 {
            return Err(key_err("conditions.q_max", format!("must be at least 4, got {}", c.q_max)));
        }
        if c.cesaro_q_max < 4 {
            return Err(key_err("conditions.cesaro_q_max", format!("must be at least 4, got {}", c.cesaro_q_max)));
        }
        match &c.x_grid {
            Some(g) => strictly_increasing("conditions.x_grid", g)?,
            None => {
                strictly_increasing("conditions.x_quantiles", &c.x_quantiles)?;
                if let Some(p) = c.x_quantiles.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                    return Err(key_err("conditions.x_quantiles", format!("levels must lie in (0, 1), got {p}")));
                }
            }
        }
        strictly_increasing("conditions.phi_delta_grid", &c.phi_delta_grid)?;
        if let Some(d) = c.phi_delta_grid.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return Err(key_err("conditions.phi_delta_grid", format!("delta ∈ (0,1) required, got {d}")));
        }
        if c.r_max < 4 {
            return Err(key_err("conditions.r_max", format!("must be at least 4, got {}", c.r_max)));
        }
        if !(c.bounded_slope < c.diverging_slope) {
            return Err(key_err("conditions.bounded_slope", "must be below conditions.diverging_slope"));
        }
        if !(c.cesaro_level > 0.0) {
            return Err(key_err("conditions.cesaro_level", "must be positive"));
        }

        let e = &self.entropy;
        if e.epsilons.is_empty() {
            return Err(key_err("entropy.epsilons", "must be nonempty"));
        }
        if let Some(x) = e.epsilons.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
            return Err(key_err("entropy.epsilons", format!("epsilon ∈ (0,1] required, got {x}")));
        }
        if let Some(m) = &e.marginal {
            let built = m.build().map_err(|err| key_err("entropy.marginal", err))?;
            if !built.is_continuous() {
                return Err(key_err("entropy.marginal", "must be continuous"));
            }
        }
        if !(e.bound_k > 0.0 && e.bound_r > 0.0) {
            return Err(key_err("entropy.bound_k", "bound constants K and r must be positive"));
        }
        if e.max_cardinality == 0 || e.max_cardinality > crate::entropy::MAX_SHATTER_POINTS {
            return Err(key_err(
                "entropy.max_cardinality",
                format!("must lie in 1..={}", crate::entropy::MAX_SHATTER_POINTS),
            ));
        }

        let i = &self.inequalities;
        if i.mc_samples < 2 || (i.newman_trials > 0 && i.newman_samples < 2) {
            return Err(key_err("inequalities.mc_samples", "Monte Carlo needs at least 2 samples"));
        }
        if i.bagai_grid == 0 {
            return Err(key_err("inequalities.bagai_grid", "must be positive"));
        }
        if i.phi_max_lag == 0 {
            return Err(key_err("inequalities.phi_max_lag", "must be positive"));
        }
        if self.output.dir.is_empty() {
            return Err(key_err("output.dir", "must be nonempty"));
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<StationaryModel> {
        self.model.build()
    }

    /// SHA-256 of the canonical JSON form of the spec, leaving out the
    /// output location.
    pub fn spec_hash(&self) -> String {
        let mut content = self.clone();
        content.output = OutputSpec::default();
        let canonical = serde_json::to_vec(&content).expect("spec serialises");
        hex::encode(Sha256::digest(&canonical))
    }

    fn gcip_params(&self, delta: f64) -> Result<GcipParams> {
        let mut p = GcipParams::new(delta, self.conditions.q_max)?;
        p.thresholds = VerdictThresholds {
            bounded_slope: self.conditions.bounded_slope,
            diverging_slope: self.conditions.diverging_slope,
        };
        Ok(p)
    }

    /// Thresholds of the indicator scan: explicit or marginal quantiles.
    pub fn x_grid(&self, model: &StationaryModel) -> Vec<f64> {
        match &self.conditions.x_grid {
            Some(g) => g.clone(),
            None => {
                let mut g: Vec<f64> = self
                    .conditions
                    .x_quantiles
                    .iter()
                    .map(|p| model.marginal().quantile(*p))
                    .collect();
                // discrete marginals repeat quantiles
                g.dedup();
                g
            }
        }
    }
}

/// Mean sup-deviation against `n` over the configured grid.
pub fn run_convergence_study(spec: &ExperimentSpec) -> Result<DeviationPath> {
    spec.validate()?;
    let model = spec.build_model()?;
    run_gc_diagnostic(&model, &spec.simulate.n_grid, spec.simulate.reps, spec.seed)
}

/// Least-squares slope of `ln(mean deviation)` on `ln n`.
pub fn fit_decay_slope(path: &DeviationPath) -> Result<SlopeFit> {
    let ns: Vec<f64> = path.n_grid().iter().map(|n| *n as f64).collect();
    let fit = log_log_fit(&ns, &path.means())?;
    Ok(fit)
}

/// Convergence study with its fitted decay, as written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub spec_hash: String,
    pub seed: u64,
    pub model: String,
    pub reps: usize,
    pub n_grid: Vec<usize>,
    pub means: Vec<f64>,
    pub fit: Option<SlopeFit>,
}

pub fn summarize_study(spec: &ExperimentSpec, path: &DeviationPath) -> Result<StudySummary> {
    Ok(StudySummary {
        spec_hash: spec.spec_hash(),
        seed: spec.seed,
        model: spec.build_model()?.id().to_string(),
        reps: spec.simulate.reps,
        n_grid: path.n_grid(),
        means: path.means(),
        fit: fit_decay_slope(path).ok(),
    })
}

/// C1 and C2 at one `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcipAtDelta {
    pub delta: f64,
    pub c1: ConditionReport,
    pub c2: ConditionReport,
}

/// Every applicable condition for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSuite {
    pub spec_hash: String,
    pub seed: u64,
    pub model: String,
    pub delta: f64,
    pub gcip: Vec<GcipAtDelta>,
    pub gcep: GcepReport,
    pub assoc_cesaro_cov13: Option<ConditionReport>,
    pub assoc_cesaro_cov: Option<ConditionReport>,
    /// Long-run variance of the probability-integral transform.
    pub long_run_variance: LongRunVariance,
    pub phi_decay: Vec<ConditionReport>,
    /// Headline verdict per condition id.
    pub summary: BTreeMap<String, Verdict>,
}

impl ConditionSuite {
    /// Every report of the suite, in a fixed order, for CSV emission.
    pub fn reports(&self) -> Vec<&ConditionReport> {
        let mut out = Vec::new();
        for g in &self.gcip {
            out.push(&g.c1);
            out.push(&g.c2);
        }
        out.push(&self.gcep.worst_c1);
        out.push(&self.gcep.worst_c2);
        out.extend(self.assoc_cesaro_cov13.iter());
        out.extend(self.assoc_cesaro_cov.iter());
        out.extend(self.phi_decay.iter());
        out
    }

    /// Long-form CSV: `condition_id,delta,x,q,statistic`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("condition_id,delta,x,q,statistic\n");
        let fmt_opt = |v: Option<&f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in self.reports() {
            let delta = fmt_opt(r.params.get("delta"));
            let x = fmt_opt(r.params.get("x"));
            for (q, s) in r.q_grid.iter().zip(&r.statistic) {
                out.push_str(&format!("{},{},{},{},{}\n", r.condition_id, delta, x, q, s));
            }
        }
        out
    }
}

pub fn run_condition_suite(spec: &ExperimentSpec) -> Result<ConditionSuite> {
    spec.validate()?;
    let model = spec.build_model()?;
    let c = &spec.conditions;
    let mut summary = BTreeMap::new();

    let gamma = LagCovariance::of_model(&model, (2 * c.q_max).max(c.cesaro_q_max))?;
    let mut deltas = c.delta_grid.clone();
    deltas.push(c.delta);
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let gcip = deltas
        .iter()
        .map(|d| {
            let p = spec.gcip_params(*d)?;
            Ok(GcipAtDelta {
                delta: *d,
                c1: gcip_c1(&gamma, &p)?,
                c2: gcip_c2(&gamma, &p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let primary = gcip.iter().find(|g| g.delta == c.delta).expect("primary delta scanned");
    summary.insert("gcip-c1".to_string(), primary.c1.verdict);
    summary.insert("gcip-c2".to_string(), primary.c2.verdict);
    let some_delta = gcip
        .iter()
        .any(|g| g.c1.verdict == Verdict::Bounded && g.c2.verdict == Verdict::Bounded);
    summary.insert("gcip".to_string(), if some_delta { Verdict::Pass } else { Verdict::Fail });

    let gcep = gcep_indicator_conditions(&model, &spec.x_grid(&model), &spec.gcip_params(c.delta)?)?;
    summary.insert("gcep-c1".to_string(), gcep.worst_c1.verdict);
    summary.insert("gcep-c2".to_string(), gcep.worst_c2.verdict);

    let (cov13, cov) = if model.is_associated() {
        let thresholds = CesaroThresholds {
            slope: c.cesaro_slope,
            level: c.cesaro_level,
        };
        let a = assoc_cesaro_with(&gamma, c.cesaro_q_max, 1.0 / 3.0, thresholds)?;
        let b = assoc_cesaro_with(&gamma, c.cesaro_q_max, 1.0, thresholds)?;
        summary.insert("assoc-cesaro-cov13".to_string(), a.verdict);
        summary.insert("assoc-cesaro-cov".to_string(), b.verdict);
        (Some(a), Some(b))
    } else {
        (None, None)
    };

    let pit = LagCovariance::from_table(model.pit_covariance_table(c.long_run_truncation))?;
    let lrv = long_run_variance(&pit, c.long_run_truncation)?;
    summary.insert(
        "long-run-variance".to_string(),
        if lrv.tail_flag { Verdict::Fail } else { Verdict::Pass },
    );

    let phi_decay = match model.markov_spec() {
        Some(chain) => {
            let profile = chain.phi_mixing_profile(c.r_max);
            let reports = c
                .phi_delta_grid
                .iter()
                .map(|d| phi_decay_check(&profile, *d))
                .collect::<Result<Vec<_>>>()?;
            let all = reports.iter().all(|r| r.verdict == Verdict::Pass);
            summary.insert("phi-decay".to_string(), if all { Verdict::Pass } else { Verdict::Fail });
            reports
        }
        None => Vec::new(),
    };

    Ok(ConditionSuite {
        spec_hash: spec.spec_hash(),
        seed: spec.seed,
        model: model.id().to_string(),
        delta: c.delta,
        gcip,
        gcep,
        assoc_cesaro_cov13: cov13,
        assoc_cesaro_cov: cov,
        long_run_variance: lrv,
        phi_decay,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyVc {
    pub family: String,
    pub vc: VcReport,
}

/// Bracketing and VC summaries for the half-line class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRun {
    pub spec_hash: String,
    pub seed: u64,
    pub marginal: String,
    pub reports: Vec<EntropyReport>,
    pub families: Vec<FamilyVc>,
}

pub fn run_entropy(spec: &ExperimentSpec) -> Result<EntropyRun> {
    spec.validate()?;
    let e = &spec.entropy;
    let marginal = match &e.marginal {
        Some(m) => m.build()?,
        None => {
            let m = spec.build_model()?.marginal().clone();
            if m.is_continuous() {
                m
            } else {
                Marginal::standard_uniform()
            }
        }
    };
    let budget = ProbeBudget {
        max_cardinality: e.max_cardinality,
        random_configs: e.random_configs,
        seed: spec.seed,
    };
    let params = BoundParams {
        k: e.bound_k,
        r: e.bound_r,
    };
    let reports = e
        .epsilons
        .iter()
        .map(|eps| halfline_entropy_report(&marginal, *eps, e.norm, params, budget))
        .collect::<Result<Vec<_>>>()?;
    let families = vec![
        FamilyVc {
            family: "half-lines".into(),
            vc: vc_index(&HalfLines, budget)?,
        },
        FamilyVc {
            family: "closed-intervals".into(),
            vc: vc_index(&ClosedIntervals, budget)?,
        },
    ];
    Ok(EntropyRun {
        spec_hash: spec.spec_hash(),
        seed: spec.seed,
        marginal: marginal.label(),
        reports,
        families,
    })
}

/// Aggregate of the random Newman trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewmanTrials {
    pub trials: usize,
    pub samples: usize,
    pub held: usize,
    /// Smallest `margin / stderr` over the trials.
    pub min_z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRun {
    pub spec_hash: String,
    pub seed: u64,
    pub battery: BatteryReport,
    pub newman_trials: NewmanTrials,
    pub all_hold: bool,
}

pub fn run_inequalities(spec: &ExperimentSpec) -> Result<InequalityRun> {
    spec.validate()?;
    let i = &spec.inequalities;
    let battery = inequality_battery(
        spec.seed,
        BatterySize {
            mc_samples: i.mc_samples,
            bagai_grid: i.bagai_grid,
            phi_max_lag: i.phi_max_lag,
        },
    )?;
    let trials = if i.newman_trials > 0 {
        newman_gaussian_trials(i.newman_trials, i.newman_samples, spec.seed)?
    } else {
        Vec::new()
    };
    let newman_trials = NewmanTrials {
        trials: trials.len(),
        samples: i.newman_samples,
        held: trials.iter().filter(|v| v.holds).count(),
        min_z: trials
            .iter()
            .filter_map(|v| v.stderr.filter(|s| *s > 0.0).map(|s| v.margin / s))
            .reduce(f64::min),
    };
    let all_hold = battery.all_hold() && newman_trials.held == newman_trials.trials;
    Ok(InequalityRun {
        spec_hash: spec.spec_hash(),
        seed: spec.seed,
        battery,
        newman_trials,
        all_hold,
    })
}
