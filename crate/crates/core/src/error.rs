use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum CurvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation requires an ad-invariant metric, got {0}")]
    NotAdInvariant(String),

    #[error("operator is not symmetric: relative asymmetry {0:.3e}")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("singular linear map: {0}")]
    Singular(String),

    #[error("unsupported family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("optimizer failure: {0}")]
    OptimizerFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CurvError>;
