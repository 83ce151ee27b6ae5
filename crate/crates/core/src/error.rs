use alloc::string::String;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input triplet is not a valid Lévy–Khintchine triplet.
    #[error("invalid triplet: {0}")]
    InvalidTriplet(String),
    /// Input lies outside the domain of the requested operation
    /// (infinite log-moment, non-power span, incompatible lattice, ...).
    #[error("domain violation: {0}")]
    DomainViolation(String),
    /// A series or quadrature could not reach the requested tolerance.
    #[error("tolerance not met: achieved {achieved:e}, requested {requested:e}")]
    Tolerance { achieved: f64, requested: f64 },
    /// The measure type is not supported by the operation.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A scalar argument is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Vectors or matrices of incompatible dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::DomainViolation(msg.into())
}
