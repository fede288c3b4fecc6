use thiserror::Error;

use crate::switching::PartitionReport;

/// Errors produced by graph construction, spectral analysis and evolution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph with {requested} vertices exceeds the size cap of {cap}")]
    SizeCap { requested: usize, cap: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition fails the switching conditions ({} violation(s))", .0.violations.len())]
    SwitchingConditions(Box<PartitionReport>),

    #[error("operation requires an unweighted graph")]
    WeightedGraph,

    #[error("invalid block spec: {0}")]
    InvalidBlockSpec(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("size mismatch: {0} vs {1} vertices")]
    SizeMismatch(usize, usize),

    #[error("vertex {vertex} out of range for graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },

    #[error("vertex count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no perfect state transfer into vertex {vertex} at t = {time} (best fidelity {best})")]
    NoPst { vertex: usize, time: f64, best: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
