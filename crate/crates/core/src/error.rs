use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Simulation produced more events than the configured cap, usually
    /// because the branching ratio is close to one.
    #[error("simulated path exceeded the event cap of {cap}")]
    RunawayPath { cap: usize },

    /// Every particle carried zero fitness at a resampling step.
    #[error("particle filter degenerated: all fitness values are zero")]
    FilterDegenerate,

    #[error("file not found: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("{}:{line}: malformed row: {msg}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{}:{line}: time {time} does not increase over the previous row", path.display())]
    NonIncreasingTimes {
        path: PathBuf,
        line: usize,
        time: f64,
    },

    #[error("{}:{line}: negative count {count}", path.display())]
    NegativeCount {
        path: PathBuf,
        line: usize,
        count: i64,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::InvalidData(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile { path }
        } else {
            Error::Io { path, source }
        }
    }
}
