use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HurstError>;

/// Every failure the library can report. [`HurstError::category`] gives a
/// stable machine-readable tag used by the command line front end.
#[derive(Debug, Error)]
pub enum HurstError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("depth {depth} exceeds J = {max} for a signal of length {n}")]
    DepthExceedsJ { depth: usize, max: usize, n: usize },

    #[error("signal of length {n} is shorter than the {filter_len}-tap filter")]
    SignalShorterThanFilter { n: usize, filter_len: usize },

    #[error("length {n} is not a multiple of 2^{depth}")]
    NonDyadicLength { n: usize, depth: usize },

    #[error("sequence of length {len} is too short for max lag {max_lag}")]
    SequenceTooShort { len: usize, max_lag: usize },

    #[error("degenerate level j = {level}: {excluded} of {total} energies are zero")]
    DegenerateLevel {
        level: i32,
        excluded: usize,
        total: usize,
    },

    #[error("level has odd length {0}; mid-energies need an even length")]
    OddLengthLevel(usize),

    #[error("no admissible pair: separation {separation} >= level length {n}")]
    NoAdmissiblePair { separation: usize, n: usize },

    #[error("spectrum levels are not consecutive integers")]
    NonConsecutiveLevels,

    #[error("regression needs at least 3 levels, got {0}")]
    TooFewLevels(usize),

    #[error("level range {j_lo}..={j_hi} is invalid: {reason}")]
    RangeInvalid {
        j_lo: i32,
        j_hi: i32,
        reason: String,
    },

    #[error("normality diagnostics need at least {min} estimates, got {got}")]
    TooFewEstimates { got: usize, min: usize },

    #[error("method comparison needs at least two methods")]
    SingleMethodReport,

    #[error("experiment aborted: {failed} of {total} replicates failed (first: {first})")]
    ExperimentAborted {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("file not found: {0}")]
    NotFound(PathBuf),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("input file is empty")]
    EmptyFile,

    #[error("non-finite sample at row {0}")]
    NonFiniteSample(usize),

    #[error("unsupported format `{format}` for {payload}")]
    UnsupportedFormat { format: String, payload: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HurstError {
    pub fn category(&self) -> &'static str {
        match self {
            HurstError::InvalidParameter(_) => "invalid-parameter",
            HurstError::DepthExceedsJ { .. } => "depth-exceeds-j",
            HurstError::SignalShorterThanFilter { .. } => "signal-shorter-than-filter",
            HurstError::NonDyadicLength { .. } => "non-dyadic-length",
            HurstError::SequenceTooShort { .. } => "sequence-too-short",
            HurstError::DegenerateLevel { .. } => "all-zero-level",
            HurstError::OddLengthLevel(_) => "odd-length-level",
            HurstError::NoAdmissiblePair { .. } => "no-admissible-pair",
            HurstError::NonConsecutiveLevels => "non-consecutive-levels",
            HurstError::TooFewLevels(_) => "too-few-levels",
            HurstError::RangeInvalid { .. } => "range-invalid",
            HurstError::TooFewEstimates { .. } => "too-few-estimates",
            HurstError::SingleMethodReport => "single-method-report",
            HurstError::ExperimentAborted { .. } => "experiment-aborted",
            HurstError::NotFound(_) => "not-found",
            HurstError::Parse { .. } => "parse-error",
            HurstError::EmptyFile => "empty-file",
            HurstError::NonFiniteSample(_) => "non-finite-sample",
            HurstError::UnsupportedFormat { .. } => "unsupported-format",
            HurstError::Io(_) => "io-error",
            HurstError::Json(_) => "io-error",
        }
    }
}
