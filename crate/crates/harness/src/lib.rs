//! Experiment harness for the importance-sampling estimators: configuration,
//! seeded repetition, NMSE/RMSE/bias-variance metrics, and result files. The
//! `wbis` binary wraps this library with `run`, `reference`, and `report`
//! subcommands.

pub mod config;
pub mod error;
pub mod metrics;
pub mod records;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, Problem};
pub use error::HarnessError;
pub use metrics::{bias_variance, nmse, rmse, summarize, MetricsSummary};
pub use records::{read_records_csv, write_records_csv, RunRecord};
pub use runner::{
    compute_credit_reference, execute_experiment, run_and_persist, run_experiment,
    ExperimentOutput, ReferenceReport, RunReport, DEFAULT_C_CONSTANT,
};
