//! Error type shared across the library.

/// Errors raised by estimators, the threshold search, and the benchmark
/// problems.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0} requires at least one sample")]
    EmptyInput(&'static str),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate sample: zero variance")]
    DegenerateSample,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("no critical value tabled for significance {0} (tabled: 0.05, 0.01)")]
    UnsupportedSignificance(f64),

    #[error("mixture weight alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("weight bound r must be positive, got {0}")]
    InvalidBound(f64),

    #[error(
        "support violation: nominal density {nominal} is positive where the \
         sampling density is {proposal}"
    )]
    SupportViolation { nominal: f64, proposal: f64 },

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("threshold selection failed: {0}")]
    ThresholdSelection(String),

    #[error("density normalization failed: {0}")]
    Normalization(String),

    #[error("invalid sample: {0}")]
    InvalidSample(&'static str),

    #[error("cross-entropy fit failed: {0}")]
    FitFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
