use thiserror::Error;

pub type Result<T> = std::result::Result<T, SkeletonError>;

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("cannot parse row {row}, column {col}: {message}")]
    Ingest { row: usize, col: usize, message: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("knots {0} and {1} coincide")]
    DegenerateKnots(usize, usize),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SkeletonError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SkeletonError::DimensionMismatch { .. } | SkeletonError::InvalidArgument(_) => 2,
            SkeletonError::NonFinite { .. }
            | SkeletonError::Ingest { .. }
            | SkeletonError::Io(_)
            | SkeletonError::Csv(_)
            | SkeletonError::Json(_) => 3,
            SkeletonError::DegenerateInput(_)
            | SkeletonError::DegenerateKnots(..)
            | SkeletonError::DegenerateSample(_) => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SkeletonError::InvalidArgument(msg.into())
    }
}
