use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("topology index {0} out of range (expected 1..=5)")]
    TopologyIndex(usize),

    #[error("infeasible link from sensor {sensor} to node {node}: {reason}")]
    InfeasibleLink {
        sensor: usize,
        node: usize,
        reason: String,
    },

    #[error("allocation profile violates {} constraint(s); first: {}", .0.len(), .0[0])]
    InvalidProfile(Vec<Violation>),

    #[error("no feasible equal-finish allocation with {slices} slice(s)")]
    InfeasibleWidths { slices: usize },

    #[error("search space of {size} exceeds the guard of {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("trace error at line {line}: {msg}")]
    Trace { line: u64, msg: String },

    #[error("trace has no frames")]
    EmptyTrace,

    #[error("dictionary format error at line {line}: {msg}")]
    Dictionary { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("frame {frame}: {source}")]
    AtFrame {
        frame: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_frame(frame: usize, err: Error) -> Self {
        Error::AtFrame {
            frame,
            source: Box::new(err),
        }
    }
}
