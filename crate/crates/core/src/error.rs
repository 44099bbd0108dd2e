//! Crate-wide error type and the process exit-code mapping used by the CLI.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed shapes, scenario files, or parameters out of range.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called with arguments its contract rejects.
    #[error("usage error: {0}")]
    Usage(String),

    /// A combinatorial or memory budget was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The computation is well-posed but numerically degenerate
    /// (e.g. every error row sits below the noise floor).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Distinct nonzero exit codes per outcome class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) => 2,
            Error::Resource(_) => 3,
            Error::Degenerate(_) => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
