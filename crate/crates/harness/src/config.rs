//! Experiment configuration: the TOML schema and its validation rules.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wbis_core::estimators::Method;

/// Which benchmark problem an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Mixture,
    Credit,
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Problem::Mixture => "mixture",
            Problem::Credit => "credit",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mixture" => Ok(Problem::Mixture),
            "credit" => Ok(Problem::Credit),
            other => Err(format!("unknown problem `{other}` (expected mixture, credit)")),
        }
    }
}

/// One experiment: a (problem, method) pair run `repeats` times at `n`
/// samples per estimate. Method-specific parameters must be present exactly
/// when the method needs them. Unknown keys in a config file are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub method: Method,
    /// Samples per estimate.
    pub n: usize,
    /// Number of independent estimates.
    pub repeats: usize,
    /// Defensive mixture weight; DIS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Normality-test significance level; WBIS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significance: Option<f64>,
    /// Grouping balance constant; WBIS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_constant: Option<f64>,
    pub master_seed: u64,
    /// Portfolio build seed; credit only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portfolio_seed: Option<u64>,
    /// True value used for error metrics. Defaults to 1 for the mixture
    /// problem; for credit, compute one with the `reference` subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_value: Option<f64>,
    /// Records CSV destination; derived outputs sit next to it.
    pub output_path: PathBuf,
}

/// Configuration errors, named after the offending field.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {reason}")]
    Field {
        field: &'static str,
        reason: String,
    },
    #[error("failed to read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config file {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
}

fn field_err(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    /// Load and validate a TOML config file.
    pub fn from_toml_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    /// Check cross-field invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(field_err("n", "must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(field_err("repeats", "must be at least 1"));
        }

        match (self.method, self.alpha) {
            (Method::Dis, None) => {
                return Err(field_err("alpha", "required when method = DIS"));
            }
            (Method::Dis, Some(a)) if !(a > 0.0 && a < 1.0) => {
                return Err(field_err(
                    "alpha",
                    format!("must lie strictly inside (0, 1), got {a}"),
                ));
            }
            (m, Some(_)) if m != Method::Dis => {
                return Err(field_err("alpha", format!("must not be set for method {m}")));
            }
            _ => {}
        }

        match (self.method, self.significance) {
            (Method::Wbis, None) => {
                return Err(field_err("significance", "required when method = WBIS"));
            }
            (Method::Wbis, Some(s)) => {
                if wbis_core::stats::ad_critical_value(s).is_err() {
                    return Err(field_err(
                        "significance",
                        format!("no critical value tabled for {s} (use 0.05 or 0.01)"),
                    ));
                }
            }
            (m, Some(_)) => {
                return Err(field_err(
                    "significance",
                    format!("must not be set for method {m}"),
                ));
            }
            _ => {}
        }

        match (self.method, self.c_constant) {
            (Method::Wbis, None) => {
                return Err(field_err("c_constant", "required when method = WBIS"));
            }
            (Method::Wbis, Some(c)) if !(c > 0.0 && c.is_finite()) => {
                return Err(field_err(
                    "c_constant",
                    format!("must be positive and finite, got {c}"),
                ));
            }
            (m, Some(_)) if m != Method::Wbis => {
                return Err(field_err(
                    "c_constant",
                    format!("must not be set for method {m}"),
                ));
            }
            _ => {}
        }

        match (self.problem, self.portfolio_seed) {
            (Problem::Credit, None) => {
                return Err(field_err(
                    "portfolio_seed",
                    "required when problem = credit",
                ));
            }
            (Problem::Mixture, Some(_)) => {
                return Err(field_err(
                    "portfolio_seed",
                    "must not be set for problem = mixture",
                ));
            }
            _ => {}
        }

        if let Some(r) = self.reference_value {
            if !r.is_finite() {
                return Err(field_err("reference_value", format!("must be finite, got {r}")));
            }
        }
        Ok(())
    }

    /// The reference value for metrics: the configured one, or 1 for the
    /// mixture problem whose integral is exactly 1.
    pub fn effective_reference(&self) -> Option<f64> {
        self.reference_value.or(match self.problem {
            Problem::Mixture => Some(1.0),
            Problem::Credit => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            problem: Problem::Mixture,
            method: Method::Mc,
            n: 1000,
            repeats: 10,
            alpha: None,
            significance: None,
            c_constant: None,
            master_seed: 1,
            portfolio_seed: None,
            reference_value: None,
            output_path: PathBuf::from("records.csv"),
        }
    }

    #[test]
    fn method_parameters_must_match_method() {
        let mut c = base();
        c.method = Method::Dis;
        assert!(matches!(
            c.validate(),
            Err(ConfigError::Field { field: "alpha", .. })
        ));
        c.alpha = Some(0.1);
        assert!(c.validate().is_ok());
        c.alpha = Some(1.0);
        assert!(c.validate().is_err());

        let mut c = base();
        c.alpha = Some(0.1);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::Field { field: "alpha", .. })
        ));

        let mut c = base();
        c.method = Method::Wbis;
        c.significance = Some(0.05);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::Field {
                field: "c_constant",
                ..
            })
        ));
        c.c_constant = Some(0.1);
        assert!(c.validate().is_ok());
        c.significance = Some(0.2);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::Field {
                field: "significance",
                ..
            })
        ));
    }

    #[test]
    fn credit_requires_portfolio_seed() {
        let mut c = base();
        c.problem = Problem::Credit;
        assert!(matches!(
            c.validate(),
            Err(ConfigError::Field {
                field: "portfolio_seed",
                ..
            })
        ));
        c.portfolio_seed = Some(3);
        assert!(c.validate().is_ok());

        let mut c = base();
        c.portfolio_seed = Some(3);
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip_and_unknown_key_rejection() {
        let mut c = base();
        c.method = Method::Wbis;
        c.significance = Some(0.01);
        c.c_constant = Some(0.1);
        let text = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);

        let with_unknown = format!("{text}\nmystery_knob = 3\n");
        let err = toml::from_str::<ExperimentConfig>(&with_unknown);
        assert!(err.is_err(), "unknown keys must be rejected");
    }

    #[test]
    fn mixture_reference_defaults_to_one() {
        assert_eq!(base().effective_reference(), Some(1.0));
        let mut c = base();
        c.problem = Problem::Credit;
        c.portfolio_seed = Some(1);
        assert_eq!(c.effective_reference(), None);
        c.reference_value = Some(3.2e-6);
        assert_eq!(c.effective_reference(), Some(3.2e-6));
    }
}
