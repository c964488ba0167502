use std::fs;
use std::path::{Path, PathBuf};

use gclab_core::empirical::DeviationPath;
use gclab_core::montecarlo::{
    run_condition_suite, run_convergence_study, run_entropy, run_inequalities, summarize_study, ConditionSuite,
    EntropyRun, ExperimentSpec, InequalityRun, StudySummary,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::CliError;

pub const DEVIATION_CSV: &str = "deviation.csv";
pub const SIMULATE_JSON: &str = "simulate.json";
pub const CONDITIONS_JSON: &str = "conditions.json";
pub const CONDITIONS_CSV: &str = "conditions.csv";
pub const ENTROPY_JSON: &str = "entropy.json";
pub const INEQUALITIES_JSON: &str = "inequalities.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const PLOT_DEVIATION_CSV: &str = "plot_deviation.csv";
pub const PLOT_CONDITIONS_CSV: &str = "plot_conditions.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json(e.to_string()))?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{}: {e}", path.display())))
}

pub fn simulate(spec: &ExperimentSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let path = run_convergence_study(spec)?;
    let summary = summarize_study(spec, &path)?;
    Ok(vec![
        write_text(out, DEVIATION_CSV, &path.to_csv())?,
        write_json(out, SIMULATE_JSON, &summary)?,
    ])
}

pub fn conditions(spec: &ExperimentSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let suite = run_condition_suite(spec)?;
    Ok(vec![
        write_json(out, CONDITIONS_JSON, &suite)?,
        write_text(out, CONDITIONS_CSV, &suite.to_csv())?,
    ])
}

pub fn entropy(spec: &ExperimentSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let run = run_entropy(spec)?;
    Ok(vec![write_json(out, ENTROPY_JSON, &run)?])
}

pub fn inequalities(spec: &ExperimentSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let run = run_inequalities(spec)?;
    Ok(vec![write_json(out, INEQUALITIES_JSON, &run)?])
}

fn plot_deviation(path: &DeviationPath) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "mean", "median", "q90"])
        .map_err(|e| CliError::Report(e.to_string()))?;
    for r in &path.rows {
        w.write_record([r.n.to_string(), r.mean.to_string(), r.median.to_string(), r.q90.to_string()])
            .map_err(|e| CliError::Report(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Merges whatever earlier subcommands left in `out` into `summary.json`
/// plus plot-ready CSVs.
pub fn report(out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut summary = Map::new();
    let mut artifacts = Vec::new();
    let mut written = Vec::new();

    let deviation = out.join(DEVIATION_CSV);
    if deviation.exists() {
        let text = fs::read_to_string(&deviation).map_err(io_err(&deviation))?;
        let path = DeviationPath::from_csv(&text)?;
        written.push(write_text(out, PLOT_DEVIATION_CSV, &plot_deviation(&path)?)?);
        artifacts.push(DEVIATION_CSV);
    }
    let simulate = out.join(SIMULATE_JSON);
    if simulate.exists() {
        let s: StudySummary = read_json(&simulate)?;
        summary.insert(
            "simulate".into(),
            json!({
                "spec_hash": s.spec_hash,
                "seed": s.seed,
                "model": s.model,
                "reps": s.reps,
                "slope": s.fit.map(|f| f.slope),
                "r_squared": s.fit.map(|f| f.r_squared),
                "final_mean": s.means.last(),
            }),
        );
        artifacts.push(SIMULATE_JSON);
    }
    let conditions = out.join(CONDITIONS_JSON);
    if conditions.exists() {
        let c: ConditionSuite = read_json(&conditions)?;
        written.push(write_text(out, PLOT_CONDITIONS_CSV, &c.to_csv())?);
        summary.insert(
            "conditions".into(),
            json!({
                "spec_hash": c.spec_hash,
                "seed": c.seed,
                "model": c.model,
                "delta": c.delta,
                "verdicts": c.summary,
            }),
        );
        artifacts.push(CONDITIONS_JSON);
    }
    let entropy = out.join(ENTROPY_JSON);
    if entropy.exists() {
        let e: EntropyRun = read_json(&entropy)?;
        let brackets: Vec<Value> = e
            .reports
            .iter()
            .map(|r| json!({"epsilon": r.epsilon, "bracket_count": r.bracket_count, "bound_value": r.bound_value}))
            .collect();
        summary.insert(
            "entropy".into(),
            json!({
                "spec_hash": e.spec_hash,
                "seed": e.seed,
                "marginal": e.marginal,
                "brackets": brackets,
                "vc_index": e.families.iter().map(|f| (f.family.clone(), json!(f.vc.index))).collect::<Map<String, Value>>(),
            }),
        );
        artifacts.push(ENTROPY_JSON);
    }
    let inequalities = out.join(INEQUALITIES_JSON);
    if inequalities.exists() {
        let i: InequalityRun = read_json(&inequalities)?;
        summary.insert(
            "inequalities".into(),
            json!({
                "spec_hash": i.spec_hash,
                "seed": i.seed,
                "all_hold": i.all_hold,
                "checks": i.battery.verdicts.len(),
                "held": i.battery.verdicts.iter().filter(|v| v.holds).count(),
                "newman_trials": i.newman_trials,
                "bagai_c_hat": i.battery.bagai_calibration.c_hat,
            }),
        );
        artifacts.push(INEQUALITIES_JSON);
    }
    if artifacts.is_empty() {
        return Err(CliError::Report(format!("no prior outputs found in {}", out.display())));
    }
    summary.insert("artifacts".into(), json!(artifacts));
    written.insert(0, write_json(out, SUMMARY_JSON, &Value::Object(summary))?);
    Ok(written)
}
