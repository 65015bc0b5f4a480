use thiserror::Error;

use crate::sdp::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    /// The nominal (or perturbed) data matrix lost full column rank.
    #[error("unsupported rank: matrix has rank {rank}, full column rank {cols} required")]
    UnsupportedRank { rank: usize, cols: usize },

    #[error("LMI is infeasible (phase-I margin {margin:.3e})")]
    Infeasible { margin: f64 },

    #[error("SDP solver stopped with status {status:?} after {iterations} Newton steps (objective {objective:.6e})")]
    Solver {
        status: SolveStatus,
        iterations: usize,
        objective: f64,
    },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
