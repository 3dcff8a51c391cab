use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroup(String),

    #[error("action matrix {index} has determinant {det}, expected ±1")]
    NonUnitAction { index: usize, det: String },

    #[error("action matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("generator index {index} out of range 1..={count}")]
    GeneratorOutOfRange { index: usize, count: usize },

    #[error("invalid length range [{lo}, {hi}]")]
    InvalidLengthRange { lo: u64, hi: u64 },

    #[error("no word with collected length in [{lo}, {hi}] after {attempts} attempts")]
    SamplingExhausted { lo: u64, hi: u64, attempts: usize },

    #[error("no non-degenerate instance after {0} attempts")]
    DegenerateInstance(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid heuristic chain {0:?}")]
    InvalidChain(String),

    #[error("chain generator exhausted after {0} edits")]
    ChainSpaceExhausted(usize),

    #[error("objective of an empty result set")]
    EmptyResults,

    #[error("task {index} panicked: {message}")]
    TaskPanicked { index: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("audit mismatch: {0}")]
    Audit(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
