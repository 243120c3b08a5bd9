use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for topology with {count} nodes")]
    NodeOutOfRange { index: usize, count: usize },

    #[error("topology line {line}: {message}")]
    TopologyParse { line: usize, message: String },

    #[error("invalid bounds: lower {lb} must be strictly below upper {ub}")]
    InvalidBounds { lb: f64, ub: f64 },

    #[error("genotype length must be at least 1")]
    EmptyGenotype,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid operator parameter: {0}")]
    InvalidParam(String),

    #[error("node {0} has no neighbors")]
    EmptyNeighborhood(usize),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("IDX format error: {0}")]
    IdxFormat(String),

    #[error("sensor data error: {0}")]
    SensorData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
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
