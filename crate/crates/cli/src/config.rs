//! Experiment config files: TOML with one section per module.
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! kind = "gaussian-ar1"
//! rho = 0.6
//!
//! [simulate]
//! n_grid = [64, 256, 1024]
//! reps = 100
//! ```
//!
//! Every section and key is optional except `model.kind` once a `[model]`
//! table is given. Unknown keys are rejected.

use gclab_core::montecarlo::ExperimentSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config schema error: {0}")]
    Schema(String),
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses and validates a config. Omitted keys take their documented
/// defaults.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let spec: ExperimentSpec = toml::from_str(text).map_err(|e| ConfigError::Parse(one_line(&e.to_string())))?;
    spec.validate().map_err(|e| ConfigError::Schema(e.to_string()))?;
    Ok(spec)
}

/// Full config text for `spec`, with every default written out.
pub fn serialize_config(spec: &ExperimentSpec) -> String {
    toml::to_string(spec).expect("experiment spec serialises to TOML")
}

pub fn read_config(path: &std::path::Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Collapses the multi-line TOML diagnostics into one line.
fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.chars().all(|c| c == '|' || c == '^' || c.is_whitespace()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Configs shipped with the crate, by file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("iid_uniform.toml", include_str!("../configs/iid_uniform.toml")),
    ("gaussian_ar1.toml", include_str!("../configs/gaussian_ar1.toml")),
    ("markov_two_state.toml", include_str!("../configs/markov_two_state.toml")),
    ("moving_average.toml", include_str!("../configs/moving_average.toml")),
    ("frozen.toml", include_str!("../configs/frozen.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gclab_core::montecarlo::{MarginalSpec, ModelSpec};

    #[test]
    fn minimal_config_fills_defaults() {
        let spec = parse_config("[model]\nkind = \"iid\"\n").unwrap();
        assert_eq!(spec, ExperimentSpec::default());
        assert_eq!(parse_config("").unwrap(), ExperimentSpec::default());
        assert_eq!(
            spec.model,
            ModelSpec::Iid {
                marginal: MarginalSpec::Uniform { lo: 0.0, hi: 1.0 }
            }
        );
    }

    #[test]
    fn delta_out_of_range() {
        let e = parse_config("[conditions]\ndelta = 3.5\n").unwrap_err().to_string();
        assert!(e.contains("delta ∈ (0,3)"), "{e}");
        assert!(e.contains("conditions.delta"), "{e}");
    }

    #[test]
    fn negative_rho_violates_association() {
        let e = parse_config("[model]\nkind = \"gaussian-ar1\"\nrho = -0.2\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("association constraint"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            "sead = 3\n",
            "[simulate]\nrep = 3\n",
            "[model]\nkind = \"gaussian-ar1\"\nrho = 0.5\nphi = 1\n",
            "[model]\nkind = \"iid\"\n[model.marginal]\ndist = \"uniform\"\nwidth = 2\n",
            "[plots]\nx = 1\n",
        ] {
            let e = parse_config(text).unwrap_err();
            assert!(matches!(e, ConfigError::Parse(_)), "{text}: {e}");
            assert!(!e.to_string().contains('\n'));
        }
    }

    #[test]
    fn unknown_model_kind_rejected() {
        assert!(parse_config("[model]\nkind = \"garch\"\n").is_err());
    }

    #[test]
    fn bundled_configs_round_trip() {
        for (name, text) in BUNDLED {
            let spec = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = parse_config(&serialize_config(&spec)).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(spec, again, "{name}");
        }
    }
}
