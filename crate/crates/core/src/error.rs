use thiserror::Error;

/// Errors reported by every stage of the checker.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: String, limit: usize },
    #[error("digest mismatch: {0}")]
    DigestMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn semantic(message: impl Into<String>) -> Self {
        Error::Semantic(message.into())
    }

    pub(crate) fn cap(what: impl Into<String>, limit: usize) -> Self {
        Error::ResourceCap {
            what: what.into(),
            limit,
        }
    }

    /// True for errors caused by exceeding a configured resource limit.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
