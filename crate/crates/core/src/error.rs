use thiserror::Error;

/// Errors produced anywhere in the certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cosine fidelity undefined for a zero-norm vector")]
    ZeroNorm,

    #[error("black box failure: {0}")]
    BlackBox(String),

    #[error("wire protocol violation: {0}")]
    Protocol(String),

    #[error("black box timed out after {0:?}")]
    Timeout(std::time::Duration),

    #[error("nothing to certify: report has no certified regions")]
    NothingToCertify,

    #[error("not enough samples: need at least {needed}, have {have}")]
    NotEnoughSamples { needed: usize, have: usize },

    #[error("piecewise model assumption violated: saw {seen} distinct fidelities with p = {pieces}")]
    TooManyPieces { seen: usize, pieces: usize },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
