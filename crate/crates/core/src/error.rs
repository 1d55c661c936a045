use thiserror::Error;

/// Errors raised by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("key length {length} out of range [1, {max}]")]
    KeyLengthOutOfRange { length: u64, max: u64 },
    #[error("expected {expected} probabilities, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("probability at index {index} is not a finite nonnegative real: {value}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1 within {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },
    #[error("distributions have different key lengths ({left} vs {right})")]
    KeyLengthMismatch { left: u32, right: u32 },
    #[error("subset must contain at least one position")]
    EmptySubset,
    #[error("subset position {0} appears more than once")]
    DuplicatePosition(u32),
    #[error("subset position {position} outside key of {key_length} bits")]
    PositionOutOfRange { position: u32, key_length: u32 },
    #[error("outcome value {value} does not fit in {bits} bits")]
    OutcomeOutOfRange { value: u64, bits: usize },
    #[error("cannot condition on an outcome of zero probability")]
    ZeroProbabilityCondition,
    #[error("known and target subsets overlap at position {0}")]
    OverlappingSubsets(u32),
    #[error("infeasible budget: epsilon {budget} exceeds limit {limit}")]
    InfeasibleBudget { budget: f64, limit: f64 },
    #[error("per-bit bias {0} outside [0, 1/2]")]
    BiasOutOfRange(f64),
    #[error("oracle limited to key length {max}, got {length}")]
    OracleScaleExceeded { length: u32, max: u32 },
    #[error("averaging levels must be 1 or 2, got {0}")]
    InvalidAveragingLevels(u8),
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("malformed file {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
