use thiserror::Error;

/// Errors raised by ring arithmetic, the encryption scheme and the tooling around them.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on coordinate count, degree or modulus.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation is not available for these parameters.
    #[error("unsupported: {0}")]
    Capability(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// The noise budget is exhausted and decryption would be unreliable.
    #[error("noise overflow: {0}")]
    NoiseOverflow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! shape_err {
    ($($arg:tt)*) => { $crate::Error::Shape(format!($($arg)*)) };
}

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::Error::Domain(format!($($arg)*)) };
}

pub(crate) use domain_err;
pub(crate) use shape_err;
