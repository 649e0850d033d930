use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: &'static str,
        line: usize,
        message: String,
    },

    #[error("unknown vertex type `{0}`")]
    UnknownVertexType(String),

    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),

    #[error("edge type `{edge_type}` {detail}")]
    TypeMismatch { edge_type: String, detail: String },

    #[error("invalid meta-path `{spec}`: {reason}")]
    MetaPath { spec: String, reason: String },

    #[error("sub-meta-path range {start}..={end} out of bounds for length {len}")]
    SubPathRange { start: usize, end: usize, len: usize },

    #[error("meta-path `{0}` has no path instances in this graph")]
    NoInstances(String),

    #[error("invalid sampling weights: {0}")]
    InvalidWeights(String),

    #[error("path instance does not follow meta-path: {0}")]
    InvalidInstance(String),

    #[error("no parameters registered for sub-meta-path `{0}`")]
    UnknownSubPath(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("worker {worker} panicked: {message}")]
    WorkerPanic { worker: usize, message: String },

    #[error("zero-norm vector: {0}")]
    ZeroNorm(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("degenerate grouping: {0}")]
    Grouping(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(source_name: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name,
            line,
            message: message.into(),
        }
    }
}
