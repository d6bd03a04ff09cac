use thiserror::Error;

/// Errors raised by the counting engine and the verification routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChamberError {
    #[error("invalid walk model: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state budget exceeded: about {required} states needed, budget is {budget}")]
    Resource { required: u128, budget: u64 },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = ChamberError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(ChamberError::DimensionMismatch { expected, got })
    }
}
