use alloc::string::String;

use crate::skeleton::{EdgeId, VertexId};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("malformed skeleton: {0}")]
    MalformedSkeleton(String),
    #[error("malformed chord diagram: {0}")]
    MalformedDiagram(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("skeleton mismatch: {0}")]
    SkeletonMismatch(String),
    #[error("strand count mismatch: expected {expected}, found {found}")]
    StrandMismatch { expected: usize, found: usize },
    #[error("truncation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("element is not invertible")]
    NotInvertible,
    #[error("invalid free group map: {0}")]
    InvalidMap(String),
    #[error("tree error: {0}")]
    Tree(String),
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
