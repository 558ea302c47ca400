use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading inputs or computing metrics.
#[derive(Error, Debug)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("term in multiple groups: {term:?} appears in {first:?} and {second:?}")]
    OverlappingTerm {
        term: String,
        first: String,
        second: String,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateDoc(String),

    #[error("documents missing from index: {}", .0.join(", "))]
    MissingDocs(Vec<String>),

    #[error("index format version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("index checksum error: {0}")]
    Checksum(String),

    #[error("lexicon fingerprint mismatch: index built with {index}, lexicon is {lexicon}")]
    Fingerprint { index: String, lexicon: String },

    #[error("degenerate background: ideal FaiRR is zero")]
    DegenerateBackground,

    #[error("duplicate item {0:?} in ranked list")]
    DuplicateInList(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end: 1 for I/O
    /// failures, 2 for everything caused by invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
