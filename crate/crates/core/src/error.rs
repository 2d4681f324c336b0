use thiserror::Error;

/// Errors raised by the discretization, solver and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("point {x} lies outside the parametric domain [0, 1]")]
    OutOfDomain { x: f64 },

    #[error("index {index} out of range (must be < {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigenvalue iteration did not converge for index {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("boundary constraint system is rank deficient (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("softness assembly requires a uniform mesh")]
    NonUniformMesh,

    #[error("insufficient data: need at least {required} usable points, found {found}")]
    InsufficientData { required: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
