use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("index out of bounds at line {line}: entry ({row}, {col}) exceeds declared size {rows}x{cols}")]
    Bounds {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// Field-level validation failure of a deserialized document.
    #[error("invalid `{field}`{}: {message}", index.map(|i| format!(" at index {i}")).unwrap_or_default())]
    Validation {
        field: String,
        index: Option<usize>,
        message: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// Initial-population generation could not produce discriminating members.
    #[error("generation failed: {0}")]
    Generation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, index: Option<usize>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            index,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for this error: 3 for failed generation, 2 for
    /// everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Generation(_) => 3,
            _ => 2,
        }
    }
}
