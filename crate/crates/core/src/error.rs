use std::path::PathBuf;

use thiserror::Error;

use crate::network::{LinkId, NodeId, Violation};

/// Errors from graph construction and resource accounting.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown substrate node {0}")]
    UnknownSubstrateNode(NodeId),
    #[error("unknown substrate link {0}")]
    UnknownSubstrateLink(LinkId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate link between {0} and {1}")]
    DuplicateLink(NodeId, NodeId),
    #[error("demands must be positive")]
    NonPositiveDemand,
    #[error("capacities must be non-negative")]
    NegativeCapacity,
    #[error("node set is empty")]
    EmptyNodeSet,
    #[error("request {0} has zero lifetime")]
    ZeroLifetime(usize),
    #[error("{what} has {found} entries, expected {expected}")]
    MapShape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("embedding violates {} constraint(s): {:?}", .0.len(), .0)]
    InvalidEmbedding(Vec<Violation>),
    #[error("reservation {0} is not live (already released?)")]
    NotReserved(u64),
    #[error("release would push a residual above its total")]
    ReleaseOverflow,
}

/// A malformed input file, with the 1-based line where parsing stopped.
#[derive(Debug, Error)]
#[error("{}:{line}: {message}", file.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
pub struct ParseError {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            file: None,
            line,
            message: message.into(),
        }
    }

    pub fn in_file(mut self, path: impl Into<PathBuf>) -> Self {
        self.file = Some(path.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Csv(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
