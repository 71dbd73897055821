use thiserror::Error;

use crate::congest::Metrics;
use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("graph parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("generator gave up after {attempts} attempts: {reason}")]
    GeneratorExhausted { attempts: usize, reason: String },

    #[error("oracle size guard: n = {n} exceeds {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge weights are not distinct")]
    DuplicateWeights,

    #[error("node {src} sent to non-neighbor {dst} in round {round}")]
    NonNeighbor { src: NodeId, dst: NodeId, round: u64 },

    #[error("round limit {limit} exceeded in phase `{phase}`")]
    Timeout {
        limit: u64,
        phase: String,
        partial: Box<Metrics>,
    },

    #[error("node {node} exceeded the declared tag bound {bound}")]
    TagBound { node: NodeId, bound: usize },

    #[error("randomized protocol failed: {0}")]
    ProtocolFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
