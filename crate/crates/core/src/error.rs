use thiserror::Error;

/// Errors raised by the numeric kernel and the channel models built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },
    #[error("denominator matrix is not positive definite")]
    SingularDenominator,
    #[error("vector is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range {range}")]
    IndexOutOfRange { index: usize, range: &'static str },
    #[error("value {value} out of range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("invalid scattering function: {0}")]
    InvalidScattering(String),
    #[error("invalid scattering quad: {0}")]
    InvalidQuad(String),
    #[error("invalid density operator: {0}")]
    InvalidDensityOperator(String),
    #[error("multiplexing scheme does not contain the origin shift (0,0)")]
    SchemeMissingOrigin,
    #[error("bad multiplexing scheme: {0}")]
    BadScheme(String),
    #[error("SINR denominator and numerator are both zero")]
    DegenerateDenominator,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
