use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be between 1 and {max}, got {got}")]
    Dimension { got: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfDomain { index: usize, value: f64 },

    #[error("cube index {index} out of range at depth {depth}")]
    InvalidCube { depth: u32, index: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown {kind} id `{id}`; registered: {registered}")]
    UnknownId {
        kind: &'static str,
        id: String,
        registered: String,
    },

    #[error("failed to parse config {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid config field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown validation suite `{0}`; valid suites: transfer, sti, concentration, no_elim, shrink, memory, all")]
    UnknownSuite(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
