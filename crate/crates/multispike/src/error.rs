use thiserror::Error;

/// Errors surfaced by this crate.
///
/// The split matters to callers: `Domain` and `Invalid` mean the request
/// itself was out of range or malformed, while `Numerical` means a
/// computation that should have succeeded did not (eigensolver breakdown,
/// factorization failure after jitter escalation). The CLI maps the former
/// to exit code 2 and the latter to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input: bad file, inconsistent dimensions, NaN entries.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A numerical procedure failed to converge or lost positive definiteness.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
