use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("empty index selection")]
    EmptySelection,

    #[error("index {index} out of range 1..={universe}")]
    IndexOutOfRange { index: usize, universe: usize },

    #[error("index set universe {got} does not match dimension {expected}")]
    UniverseMismatch { expected: usize, got: usize },

    #[error("selected columns are rank deficient (smallest singular value {smallest:e}, largest {largest:e})")]
    SingularSelection { smallest: f64, largest: f64 },

    #[error("matrix is not an orthogonal projector (idempotence error {idempotence:e}, symmetry error {symmetry:e})")]
    NotAProjector { idempotence: f64, symmetry: f64 },

    #[error("enumeration of {subsets} subsets exceeds budget {budget}; use a Monte Carlo estimate instead")]
    EnumerationTooLarge { subsets: u128, budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate greedy selection at step {step}: selected columns are rank deficient")]
    DegenerateSelection { step: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
