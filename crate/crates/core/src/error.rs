//! Error type shared across the crate.

use crate::graph::{Edge, VertexId};

/// Errors produced by graph loading, preprocessing, and queries.
///
/// Errors split into two families: *contract violations* (the caller asked
/// for something the API forbids, such as exceeding the failure budget) and
/// *environment errors* (unparseable input, corrupt index files, I/O).
/// [`Error::is_contract_violation`] distinguishes them so binaries can map
/// the families to different exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input text could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A failed edge does not exist in the graph being queried.
    #[error("failed edge {0} is not an edge of the graph")]
    UnknownEdge(Edge),

    /// A vertex id is outside the graph's vertex range.
    #[error("vertex {0} is out of range")]
    UnknownVertex(VertexId),

    /// Edge-deletion was handed a failure set containing vertices.
    #[error("edge deletion cannot handle vertex failures; split vertices first")]
    VertexFailureInDelete,

    /// More failures were supplied than the index was built for.
    #[error("failure budget exceeded: {given} failures supplied, index supports at most {budget}")]
    FailureBudgetExceeded { given: usize, budget: u32 },

    /// A failed edge lies on the query path, which the single-path routines
    /// do not accept (the caller must split the path at that edge instead).
    #[error("failed edge {0} lies on the query path")]
    FailedEdgeOnPath(Edge),

    /// Depth-first tree construction found a vertex the root cannot reach.
    #[error("vertex {0} is unreachable from the requested root")]
    UnreachableVertex(VertexId),

    /// An exhaustive routine would exceed its work budget.
    #[error(
        "estimated work {required} exceeds budget {budget}; \
         use the trivial provider or raise the budget for desk-scale inputs"
    )]
    BudgetExceeded { required: u128, budget: u128 },

    /// A vertex sequence is not a path of the host graph.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// The index was built without update support.
    #[error("index was built without update support; rebuild with updates enabled")]
    UpdatesNotSupported,

    /// An index file is malformed: bad magic, wrong version, truncation,
    /// or checksum mismatch.
    #[error("index format error: {0}")]
    IndexFormat(String),

    /// A documented API precondition was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error reports caller misuse of a documented contract,
    /// as opposed to bad input data or an I/O failure.
    pub fn is_contract_violation(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. } | Error::IndexFormat(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
