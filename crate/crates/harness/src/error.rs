//! Harness-level errors.

use std::path::PathBuf;

use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] wbis_core::Error),

    #[error("empty input: {0} requires at least one estimate")]
    EmptyEstimates(&'static str),

    #[error("too few estimates: need at least {needed}, got {got}")]
    TooFewEstimates { needed: usize, got: usize },

    #[error(
        "reference cross-check failed: IS aggregate {is_aggregate:e} and WBIS aggregate \
         {wbis_aggregate:e} disagree by {relative_gap:.1}% (limit {limit:.0}%)"
    )]
    ReferenceMismatch {
        is_aggregate: f64,
        wbis_aggregate: f64,
        relative_gap: f64,
        limit: f64,
    },

    #[error("credit runs need a reference value; set `reference_value` or run `wbis reference`")]
    MissingReference,

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
