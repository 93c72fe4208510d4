use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("clock went backwards: start {start_ns} ns, end {end_ns} ns")]
    ClockWentBackwards { start_ns: u64, end_ns: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("series {a:?} and {b:?} are not on the same size grid")]
    MismatchedGrid { a: String, b: String },

    #[error("invalid series {label:?}: {reason}")]
    InvalidSeries { label: String, reason: String },

    #[error("no series to rank")]
    NoSeries,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
