use thiserror::Error;

/// Errors raised by the linear-algebra core and the model layers above it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^H| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix has eigenvalue {value:e} below -{tol:e}")]
    NegativeEigenvalue { value: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("cavity population outside {{|0>, |1>}} is {probability:e}, above {tol:e}")]
    CavityLeakage { probability: f64, tol: f64 },

    #[error("subsystems of a pair must be distinct (got {0} twice)")]
    RepeatedSubsystem(&'static str),

    #[error("invalid density matrix: {property} violated ({value:e})")]
    InvalidDensity { property: &'static str, value: f64 },

    #[error("entry ({row}, {col}) outside the X pattern has magnitude {magnitude:e}")]
    NotXForm { row: usize, col: usize, magnitude: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite concurrence sample at t = {t}")]
    NonFiniteSample { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
