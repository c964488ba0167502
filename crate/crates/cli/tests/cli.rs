use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL_AR1: &str = r#"
seed = 11

[model]
kind = "gaussian-ar1"
rho = 0.6

[simulate]
n_grid = [64, 128, 256, 512]
reps = 40

[conditions]
q_max = 200
cesaro_q_max = 200
delta_grid = [1.0]
x_quantiles = [0.25, 0.5, 0.75]
r_max = 50
long_run_truncation = 50

[entropy]
epsilons = [0.5, 0.1]
max_cardinality = 4
random_configs = 4

[inequalities]
mc_samples = 20000
bagai_grid = 11
phi_max_lag = 10
newman_trials = 20
newman_samples = 2000
"#;

fn gclab(dir: &Path, args: &[&str]) -> Output {
    let config = dir.join("ar1.toml");
    if !config.exists() {
        fs::write(&config, SMALL_AR1).unwrap();
    }
    Command::new(env!("CARGO_BIN_EXE_gclab"))
        .args(args)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gclab(tmp.path(), &["simulate", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(tmp.path().join("out/deviation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,mean,median,q90,reps,seed"));
    assert_eq!(lines.count(), 4);
    let summary = read_json(&tmp.path().join("out/simulate.json"));
    assert_eq!(summary["seed"], 11);
    assert_eq!(summary["spec_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_override_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(gclab(tmp.path(), &["simulate", "--quiet"]).status.success());
    let a = fs::read(tmp.path().join("out/deviation.csv")).unwrap();
    assert!(gclab(tmp.path(), &["simulate", "--quiet", "--seed", "12"]).status.success());
    let b = fs::read(tmp.path().join("out/deviation.csv")).unwrap();
    assert_ne!(a, b);
    let summary = read_json(&tmp.path().join("out/simulate.json"));
    assert_eq!(summary["seed"], 12);
}

#[test]
fn conditions_report_every_family() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gclab(tmp.path(), &["conditions"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("conditions.json"));
    let suite = read_json(&tmp.path().join("out/conditions.json"));
    assert_eq!(suite["seed"], 11);
    let summary = suite["summary"].as_object().unwrap();
    for key in ["gcip-c1", "gcip-c2", "gcep-c1", "gcep-c2", "assoc-cesaro-cov13", "long-run-variance"] {
        assert!(summary.contains_key(key), "missing {key}");
    }
    assert_eq!(summary["assoc-cesaro-cov13"], "to-zero");
    let csv = fs::read_to_string(tmp.path().join("out/conditions.csv")).unwrap();
    assert!(csv.starts_with("condition_id,delta,x,q,statistic\n"));
}

#[test]
fn report_merges_prior_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["simulate", "entropy", "inequalities"] {
        let out = gclab(tmp.path(), &[cmd, "--quiet"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = gclab(tmp.path(), &["report", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&tmp.path().join("out/summary.json"));
    let artifacts: Vec<&str> = summary["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(artifacts, ["deviation.csv", "simulate.json", "entropy.json", "inequalities.json"]);
    assert_eq!(summary["entropy"]["vc_index"]["half-lines"], 2);
    assert_eq!(summary["inequalities"]["seed"], 11);
    assert!(tmp.path().join("out/plot_deviation.csv").exists());
}

#[test]
fn report_without_outputs_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gclab(tmp.path(), &["report"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no prior outputs"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_gclab")).arg("plot").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn invalid_config_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "[conditions]\ndelta = 3.5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gclab"))
        .arg("conditions")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("gclab: config schema error"), "{err}");
}

#[test]
fn zero_threads_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gclab(tmp.path(), &["simulate", "--threads", "0"]);
    assert!(!out.status.success());
}
