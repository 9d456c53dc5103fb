use thiserror::Error;

/// Errors produced by the curvlab library.
#[derive(Debug, Error)]
pub enum CurvError {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CurvError>;
