use ssd_core::Error;

/// Failures with a fixed process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed spec, flag or argument.
    #[error("parse error: {0}")]
    Parse(String),
    /// Input outside the domain of the requested operation.
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("tolerance not met: {0}")]
    Tolerance(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DomainViolation(s) => CliError::Domain(s),
            Error::Unsupported(s) => CliError::Domain(format!("unsupported: {s}")),
            Error::Tolerance { achieved, requested } => {
                CliError::Tolerance(format!("achieved {achieved:e}, requested {requested:e}"))
            }
            Error::InvalidTriplet(s) => CliError::Parse(format!("invalid triplet: {s}")),
            Error::InvalidArgument(s) => CliError::Parse(s),
            e @ Error::Dimension { .. } => CliError::Parse(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
