use thiserror::Error;

use crate::map::VertexId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("no vertices")]
    NoVertices,

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("radius {radius} exceeds the faithful region (frontier vertex {vertex} at depth {depth})")]
    NotFaithful {
        radius: usize,
        vertex: VertexId,
        depth: usize,
    },

    #[error("face degree unknown at vertex {vertex} (truncation too small)")]
    UnknownFaceDegree { vertex: VertexId },

    #[error("vertex set is not connected")]
    Disconnected,

    #[error("empty vertex set")]
    EmptySet,

    #[error("unsupported generator parameters: {0}")]
    Unsupported(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search too large: {0}")]
    TooLarge(String),

    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
