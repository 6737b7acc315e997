use thiserror::Error;

/// Errors raised by the geometry, capacity and geodesic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction must lie in the closed positive orthant (coordinate {index} is {value})")]
    NegativeDirection { index: usize, value: f64 },

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("monte carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("exact covolume supports dimension <= {max}, got {dim}; use the monte carlo method")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("exact path unavailable: {0}")]
    ExactUnavailable(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unbounded | Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
