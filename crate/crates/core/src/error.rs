//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range, graph has {node_count} nodes")]
    InvalidNode { node: u32, node_count: usize },

    #[error("partition covers {got} nodes but the graph has {expected}")]
    PartialPartition { got: usize, expected: usize },

    #[error("operation requires a non-empty graph")]
    EmptyGraph,

    #[error("chain for microblog {microblog} is empty after filtering against the graph")]
    EmptyChain { microblog: u64 },

    #[error("corrupt chain record for microblog {microblog}: {reason}")]
    CorruptRecord { microblog: u64, reason: String },

    #[error("path length undefined: node {node} is neither active nor exposed at the snapshot")]
    UndefinedPath { node: u32 },

    #[error("no edge from node {from} to node {to}")]
    MissingEdge { from: u32, to: u32 },

    #[error("node {node} has no in-neighbors; it cannot carry an instance")]
    ZeroInDegree { node: u32 },

    #[error("non-positive time gap {gap} for active neighbor {neighbor}: label leakage")]
    NonPositiveTimeGap { neighbor: u32, gap: f64 },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("row width {got} does not match model width {expected}")]
    WidthMismatch { got: usize, expected: usize },

    #[error("prediction and truth lengths differ: {predicted} vs {actual}")]
    LengthMismatch { predicted: usize, actual: usize },

    #[error(
        "cannot sample {requested} negatives per positive; at most {achievable:.4} achievable"
    )]
    InsufficientNegatives { requested: f64, achievable: f64 },

    #[error("{positives} positives are too few for {folds}-fold cross validation")]
    TooFewPositives { positives: usize, folds: usize },

    #[error("feature group selects zero columns")]
    EmptyFeatureGroup,

    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
