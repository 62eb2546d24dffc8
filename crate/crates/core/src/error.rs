use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::label::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A record in an input file could not be parsed. The message names the
    /// offending line or row.
    #[error("{0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cannot write report to {}: {source}", path.display())]
    Report {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("no vocabulary: every document is empty")]
    EmptyVocabulary,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("link table is empty, nothing can be labeled")]
    NoLinks,

    #[error("class {0} has no samples")]
    MissingClass(Label),

    #[error("class {label} has {found} samples, need at least {needed}")]
    TooFewSamples {
        label: Label,
        found: usize,
        needed: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Report { .. } => 4,
            _ => 3,
        }
    }
}
