use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad index set: {0}")]
    BadIndexSet(String),

    #[error("differentiating set {0} does not correspond to a bridge")]
    NotABridge(String),

    #[error("conditioning set is empty")]
    EmptyJ,

    #[error("expected a constant polynomial, got {0}")]
    NonConstant(String),

    #[error("prediction time {0} outside [0, 1)")]
    BadHorizon(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pieces disagree on the diagonal s = t")]
    Discontinuous,
}

pub type Result<T> = std::result::Result<T, Error>;
