use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the label extraction library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("truncated payload in frame {frame}: expected {expected} bytes, got {got}")]
    Truncated {
        frame: usize,
        expected: usize,
        got: usize,
    },

    #[error("no input frames found in {0}")]
    EmptyInput(PathBuf),

    #[error(
        "dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h} ({context})"
    )]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
        context: String,
    },

    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("non-finite value in flow solver at pyramid level {level}")]
    NumericalFailure { level: usize },

    #[error("flow provider failed on frame pair {pair}: {source}")]
    Provider {
        pair: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
