use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate input: vector {index} is linearly dependent on its predecessors")]
    Degenerate { index: usize },

    #[error("degenerate direction: w must be non-zero")]
    ZeroDirection,

    #[error(
        "insufficient sampling: no cloud point within epsilon = {epsilon:e} of the candidate \
         (nearest distinct point at {nearest:e})"
    )]
    InsufficientSampling { epsilon: f64, nearest: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
