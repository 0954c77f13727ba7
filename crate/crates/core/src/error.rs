use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the optimizer, the benchmark catalog and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed log data: {0}")]
    Parse(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
