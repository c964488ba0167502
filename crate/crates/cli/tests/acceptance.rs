//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use gclab_core::conditions::{
    assoc_cesaro_cov13, gcip_c1, phi_decay_check, variance_expansion, variance_table, GcipParams, LagCovariance,
    Verdict,
};
use gclab_core::empirical::{bracket_sup_bound, ks_sup_deviation, run_gc_diagnostic};
use gclab_core::entropy::{bracket_net_halflines, shatters, vc_index, HalfLines, ProbeBudget};
use gclab_core::generators::{Marginal, StationaryModel};
use gclab_core::inequalities::{
    check_phi_covariance, inequality_battery, newman_gaussian_trials, two_state_chain, BatterySize,
};
use gclab_core::montecarlo::fit_decay_slope;
use gclab_core::empirical::Observable;
use gclab_core::rng::stream_rng;
use gclab_core::Path;
use rand::Rng;

const SEED: u64 = 0xacce_9700;

// 1
const KS_N: usize = 4096;
const KS_REPS: usize = 200;
const KS_SCALED_RANGE: (f64, f64) = (0.75, 1.00);
const KS_MAX_SECONDS: f64 = 30.0;
// 2
const AR1_RHO: f64 = 0.6;
const CESARO_Q_MAX: usize = 1000;
const CESARO_LEVEL: f64 = 0.01;
const AR1_SLOPE_RANGE: (f64, f64) = (-0.6, -0.35);
// 3
const PHI_1: f64 = 7.0 / 15.0;
const PHI_1_TOL: f64 = 1e-12;
const PHI_RATIO: f64 = 0.7;
const PHI_RATIO_TOL: f64 = 0.01;
const PHI_R_MAX: usize = 400;
// 4
const C1_LIMIT: f64 = 4.0;
const C1_TOL: f64 = 0.05;
const C1_Q_MAX: usize = 1000;
// 5
const EXPANSION_TOL: f64 = 1e-10;
const EXPANSION_Q_MAX: usize = 50;
const EXPANSION_PROFILES: usize = 20;
// 6
const BRACKET_CASES: [(f64, usize); 3] = [(0.5, 2), (0.1, 10), (0.01, 100)];
// 7
const BRACKET_PATHS: usize = 100;
const BRACKET_LEVELS: [f64; 3] = [0.5, 0.1, 0.02];
// 8
const EXACT_MARGIN: f64 = -1e-10;
const NEWMAN_TRIALS: usize = 1000;
const NEWMAN_SAMPLES: usize = 10_000;
const CHAIN_LHS: f64 = 0.15556;
const CHAIN_RHS: f64 = 0.4554;
const CHAIN_DECIMAL_TOL: f64 = 1e-4;
// 9
const THREADS: [usize; 2] = [1, 8];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn n_grid() -> Vec<usize> {
    (6..=14).map(|k| 1usize << k).collect()
}

fn iid_gc_law() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let model = StationaryModel::iid(Marginal::standard_uniform());
    let start = Instant::now();
    let path = pool
        .install(|| run_gc_diagnostic(&model, &[KS_N], KS_REPS, SEED))
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let scaled = path.rows[0].mean * (KS_N as f64).sqrt();
    check(
        scaled >= KS_SCALED_RANGE.0 && scaled <= KS_SCALED_RANGE.1 && secs < KS_MAX_SECONDS,
        format!(
            "mean KS*sqrt(n) = {scaled:.4} (want [{}, {}]), {secs:.2} s single-threaded (want < {KS_MAX_SECONDS})",
            KS_SCALED_RANGE.0, KS_SCALED_RANGE.1
        ),
    )
}

fn association_cesaro() -> Outcome {
    let model = StationaryModel::gaussian_ar1(AR1_RHO).map_err(|e| e.to_string())?;
    let gamma = LagCovariance::of_model(&model, CESARO_Q_MAX).map_err(|e| e.to_string())?;
    let cesaro = assoc_cesaro_cov13(&gamma, CESARO_Q_MAX).map_err(|e| e.to_string())?;
    let a_last = cesaro.last();
    let path = run_gc_diagnostic(&model, &n_grid(), KS_REPS, SEED + 2).map_err(|e| e.to_string())?;
    let slope = fit_decay_slope(&path).map_err(|e| e.to_string())?.slope;
    check(
        cesaro.verdict == Verdict::ToZero
            && a_last < CESARO_LEVEL
            && slope >= AR1_SLOPE_RANGE.0
            && slope <= AR1_SLOPE_RANGE.1,
        format!(
            "cesaro13 verdict {}, a_{CESARO_Q_MAX} = {a_last:.5} (want < {CESARO_LEVEL}); decay slope {slope:.3} (want [{}, {}])",
            cesaro.verdict, AR1_SLOPE_RANGE.0, AR1_SLOPE_RANGE.1
        ),
    )
}

fn phi_mixing_chain() -> Outcome {
    let chain = two_state_chain();
    let phi = chain.phi_mixing_profile(PHI_R_MAX);
    let phi1_err = (phi[0] - PHI_1).abs();
    let ratio = phi[PHI_R_MAX - 1] / phi[PHI_R_MAX - 2];
    let mut failing = Vec::new();
    for k in 1..=9 {
        let delta = k as f64 / 10.0;
        let r = phi_decay_check(&phi, delta).map_err(|e| e.to_string())?;
        if r.verdict != Verdict::Pass {
            failing.push(delta);
        }
    }
    let model = StationaryModel::markov_chain(chain);
    let path = run_gc_diagnostic(&model, &n_grid(), KS_REPS, SEED + 3).map_err(|e| e.to_string())?;
    let means = path.means();
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    check(
        phi1_err <= PHI_1_TOL && (ratio - PHI_RATIO).abs() <= PHI_RATIO_TOL && failing.is_empty() && decreasing,
        format!(
            "|phi(1) - 7/15| = {phi1_err:.1e}; phi({PHI_R_MAX})/phi({}) = {ratio:.6}; phi_decay failing deltas {failing:?}; \
             deviation decreasing over 2^6..2^14: {decreasing} ({:.4} -> {:.4})",
            PHI_R_MAX - 1,
            means[0],
            means[means.len() - 1]
        ),
    )
}

fn gcip_conditions() -> Outcome {
    let params = GcipParams::new(1.0, C1_Q_MAX).map_err(|e| e.to_string())?;
    let ar1 = StationaryModel::gaussian_ar1(AR1_RHO).map_err(|e| e.to_string())?;
    let gamma = LagCovariance::of_model(&ar1, C1_Q_MAX).map_err(|e| e.to_string())?;
    let c1 = gcip_c1(&gamma, &params).map_err(|e| e.to_string())?;
    let upward = c1.statistic.windows(2).all(|w| w[1] >= w[0]);
    let frozen = StationaryModel::frozen(Marginal::standard_uniform());
    let g_frozen = LagCovariance::of_model(&frozen, C1_Q_MAX).map_err(|e| e.to_string())?;
    let c1_frozen = gcip_c1(&g_frozen, &params).map_err(|e| e.to_string())?;
    check(
        upward
            && (c1.last() - C1_LIMIT).abs() <= C1_TOL
            && c1.sup <= C1_LIMIT + C1_TOL
            && c1.verdict == Verdict::Bounded
            && c1_frozen.verdict == Verdict::Diverging,
        format!(
            "ar1 C1 nondecreasing: {upward}, C1({C1_Q_MAX}) = {:.4} (want {C1_LIMIT} +- {C1_TOL}), verdict {}; \
             constant sequence verdict {}",
            c1.last(),
            c1.verdict,
            c1_frozen.verdict
        ),
    )
}

fn variance_expansion_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for profile in 0..EXPANSION_PROFILES {
        let mut rng = stream_rng(SEED, profile as u64);
        let mut values: Vec<f64> = (0..EXPANSION_Q_MAX).map(|_| rng.random_range(-1.0..1.0)).collect();
        values[0] = values[0].abs();
        let gamma = LagCovariance::from_table(values.clone()).map_err(|e| e.to_string())?;
        let table = variance_table(&gamma, EXPANSION_Q_MAX).map_err(|e| e.to_string())?;
        for q in 1..=EXPANSION_Q_MAX {
            let mut brute = 0.0;
            for i in 0..q {
                for j in 0..q {
                    brute += values[i.abs_diff(j)];
                }
            }
            let v = variance_expansion(&gamma, q).map_err(|e| e.to_string())?;
            worst = worst.max((v - brute).abs()).max((table[q - 1] - brute).abs());
        }
    }
    check(
        worst <= EXPANSION_TOL,
        format!("max |expansion - double sum| = {worst:.2e} over q <= {EXPANSION_Q_MAX}, {EXPANSION_PROFILES} profiles (want <= {EXPANSION_TOL:e})"),
    )
}

fn entropy_module() -> Outcome {
    let mut rng = stream_rng(SEED, 6);
    let mut singles = true;
    let mut pairs_or_triples = false;
    for _ in 0..50 {
        let a: f64 = rng.random_range(-5.0..5.0);
        let b: f64 = a + rng.random_range(0.01..3.0);
        let c: f64 = b + rng.random_range(0.01..3.0);
        singles &= shatters(&[a], &HalfLines).map_err(|e| e.to_string())?;
        pairs_or_triples |= shatters(&[a, b], &HalfLines).map_err(|e| e.to_string())?;
        pairs_or_triples |= shatters(&[a, b, c], &HalfLines).map_err(|e| e.to_string())?;
    }
    let vc = vc_index(&HalfLines, ProbeBudget::default()).map_err(|e| e.to_string())?;
    let u = Marginal::standard_uniform();
    let counts = BRACKET_CASES
        .iter()
        .map(|(eps, _)| bracket_net_halflines(&u, *eps).map(|n| n.net.len()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let expected: Vec<usize> = BRACKET_CASES.iter().map(|(_, c)| *c).collect();
    check(
        singles && !pairs_or_triples && vc.index == Some(2) && counts == expected,
        format!(
            "singletons shattered: {singles}; some 2/3-point set shattered: {pairs_or_triples}; VC index {:?}; \
             bracket counts {counts:?} (want {expected:?})",
            vc.index
        ),
    )
}

fn bracket_bound() -> Outcome {
    let u = Marginal::standard_uniform();
    let nets = BRACKET_LEVELS
        .iter()
        .map(|eps| bracket_net_halflines(&u, *eps))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut violations = 0;
    let mut worst_gap_excess = f64::NEG_INFINITY;
    for p in 0..BRACKET_PATHS {
        let mut rng = stream_rng(SEED + 7, p as u64);
        let n = rng.random_range(1..400);
        let path = Path::from_values((0..n).map(|_| rng.random::<f64>()).collect());
        let ks = ks_sup_deviation(&path, &u).map_err(|e| e.to_string())?;
        for (eps, net) in BRACKET_LEVELS.iter().zip(&nets) {
            let bound = bracket_sup_bound(&path, &net.net).map_err(|e| e.to_string())?;
            if bound < ks {
                violations += 1;
            }
            worst_gap_excess = worst_gap_excess.max(bound - ks - eps);
        }
    }
    let hand = Path::from_values(vec![0.25, 0.75]);
    let hand_ks = ks_sup_deviation(&hand, &u).map_err(|e| e.to_string())?;
    let hand_bound = bracket_sup_bound(&hand, &nets[0].net).map_err(|e| e.to_string())?;
    check(
        violations == 0 && worst_gap_excess <= 1e-12 && hand_bound == 0.5 && hand_ks == 0.25,
        format!(
            "bound < KS in {violations} of {} cases; max (gap - eps) = {worst_gap_excess:.3e}; \
             hand instance bound {hand_bound} vs KS {hand_ks} (want 0.5 vs 0.25)",
            BRACKET_PATHS * BRACKET_LEVELS.len()
        ),
    )
}

fn inequality_battery_check() -> Outcome {
    let battery = inequality_battery(SEED, BatterySize::default()).map_err(|e| e.to_string())?;
    let exact: Vec<_> = battery
        .verdicts
        .iter()
        .filter(|v| v.inequality_id == "indicator-cov-bound" || v.inequality_id == "phi-covariance")
        .collect();
    let min_margin = exact.iter().map(|v| v.margin).fold(f64::INFINITY, f64::min);
    let trials = newman_gaussian_trials(NEWMAN_TRIALS, NEWMAN_SAMPLES, SEED).map_err(|e| e.to_string())?;
    let held = trials.iter().filter(|v| v.holds).count();
    let id = Observable::identity();
    let chain = check_phi_covariance(&two_state_chain(), 1, &id, &id, 2.0).map_err(|e| e.to_string())?;
    check(
        min_margin >= EXACT_MARGIN
            && held == NEWMAN_TRIALS
            && chain.holds
            && (chain.lhs - CHAIN_LHS).abs() <= CHAIN_DECIMAL_TOL
            && (chain.rhs - CHAIN_RHS).abs() <= CHAIN_DECIMAL_TOL,
        format!(
            "{} exact checks, min margin {min_margin:.3e} (want >= {EXACT_MARGIN:e}); Newman held in {held}/{NEWMAN_TRIALS} \
             trials; chain lag-1 lhs {:.5} <= rhs {:.4}",
            exact.len(),
            chain.lhs,
            chain.rhs
        ),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gclab");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/iid_uniform.toml");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in THREADS {
        let out = tmp.path().join(format!("t{threads}"));
        let status = Command::new(bin)
            .args(["simulate", "--quiet", "--config", config, "--seed", "42", "--threads"])
            .arg(threads.to_string())
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("gclab simulate --threads {threads} exited with {status}"));
        }
        outputs.push(std::fs::read(out.join("deviation.csv")).map_err(|e| e.to_string())?);
    }
    check(
        outputs[0] == outputs[1],
        format!(
            "deviation.csv at {} and {} threads: {} bytes each, identical: {}",
            THREADS[0],
            THREADS[1],
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("iid Glivenko-Cantelli law", iid_gc_law),
        ("association Cesàro means", association_cesaro),
        ("phi-mixing chain", phi_mixing_chain),
        ("C1 at delta = 1", gcip_conditions),
        ("variance expansion oracle", variance_expansion_oracle),
        ("shattering and bracket counts", entropy_module),
        ("bracket sup bound", bracket_bound),
        ("inequality battery", inequality_battery_check),
        ("determinism across threads", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
