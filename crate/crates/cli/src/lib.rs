//! `gclab`: run convergence studies, condition suites, entropy summaries
//! and inequality checks from a TOML experiment config.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use gclab_core::montecarlo::ExperimentSpec;
use thiserror::Error;

pub mod commands;
pub mod config;

pub use config::{parse_config, serialize_config, ConfigError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] gclab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(String),
    #[error("report: {0}")]
    Report(String),
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Parser)]
#[command(name = "gclab", version, about = "Glivenko-Cantelli simulation and verification laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (TOML); defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads. Affects speed only, never output bytes.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Suppress the list of written files.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Replicated sup-deviation study over the n grid.
    Simulate,
    /// C1/C2, indicator, Cesàro, long-run variance and mixing-rate checks.
    Conditions,
    /// Bracketing numbers and VC indices.
    Entropy,
    /// Covariance inequality battery.
    Inequalities,
    /// Merge earlier outputs into summary.json and plot-ready CSVs.
    Report,
}

/// The spec a run will use: config file (or defaults) plus overrides.
pub fn resolve_spec(cli: &Cli) -> Result<ExperimentSpec, CliError> {
    let mut spec = match &cli.config {
        Some(path) => config::read_config(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(out) = &cli.out {
        spec.output.dir = out.display().to_string();
    }
    spec.validate().map_err(|e| ConfigError::Schema(e.to_string()))?;
    Ok(spec)
}

/// Runs one subcommand and returns the files it wrote.
pub fn dispatch(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Threads("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Threads(e.to_string()))?;
    pool.install(|| {
        if cli.command == Command::Report {
            let out = match &cli.out {
                Some(out) => out.clone(),
                None => PathBuf::from(resolve_spec(cli)?.output.dir),
            };
            return commands::report(&out);
        }
        let spec = resolve_spec(cli)?;
        let out = Path::new(&spec.output.dir);
        match cli.command {
            Command::Simulate => commands::simulate(&spec, out),
            Command::Conditions => commands::conditions(&spec, out),
            Command::Entropy => commands::entropy(&spec, out),
            Command::Inequalities => commands::inequalities(&spec, out),
            Command::Report => unreachable!("handled above"),
        }
    })
}
