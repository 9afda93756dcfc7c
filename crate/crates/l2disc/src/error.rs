use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
///
/// Every error maps to a documented process exit code via [`Error::exit_code`]:
/// domain and size-limit violations exit 1, parse/IO failures exit 2, and
/// internal consistency violations (a verified numeric claim failing) exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal consistency violation: {0}")]
    Inconsistency(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn size_limit(msg: impl Into<String>) -> Self {
        Error::SizeLimit(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::SizeLimit(_) => 1,
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Inconsistency(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
