//! Fault-tolerant strongly connected components.
//!
//! Preprocess a directed graph once into an [`FtSccIndex`]; afterwards,
//! for any failure set of at most `k` edges and vertices, report the
//! complete SCC partition of the surviving graph, without rerunning a
//! static SCC pass over the whole graph. Indices built with update
//! support additionally answer batched queries that combine up to `k`
//! deletions with up to `k` edge insertions.
//!
//! The moving parts, bottom up:
//!
//! * [`graph`] — compact digraph representation, text parsing, static
//!   SCCs (Tarjan), vertex splitting, failure sets, partitions.
//! * [`decomposition`] — DFS trees and heavy path decomposition.
//! * [`ftrs`] — per-source reachability subgraphs that stay correct under
//!   up to `k` edge failures, with an exhaustive verifier. The trivial
//!   provider shares the host graph; the greedy provider actually
//!   sparsifies, at a cost exponential in the host size (small hosts
//!   only).
//! * [`path_scc`] — the per-path query core: divide-and-conquer marks
//!   over a fixed path, grouped into the SCCs intersecting it.
//! * [`fault_index`] — the oracle: per-component DFS + heavy paths +
//!   per-path structures, swept in depth order at query time.
//! * [`updates`] — insertion support via per-vertex auxiliary graphs.
//! * [`index_io`] — deterministic binary serialization of the index.
//!
//! ```
//! use std::sync::Arc;
//! use ftscc_core::{DirectedGraph, Edge, FailureSet, FtSccIndex, FtrsStrategy};
//!
//! let graph = Arc::new(DirectedGraph::parse("p 3 3\n0 1\n1 2\n2 0\n")?);
//! let index = FtSccIndex::preprocess(graph, 1, FtrsStrategy::Trivial, false)?;
//! let partition = index.query(&FailureSet::from_edges([Edge::of(1, 2)]))?;
//! assert_eq!(partition.components().len(), 3);
//! # Ok::<(), ftscc_core::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod decomposition;
pub mod error;
pub mod fault_index;
pub mod ftrs;
pub mod graph;
pub mod index_io;
pub mod path_scc;
pub mod updates;

pub use decomposition::{DfsTree, HeavyPath, HeavyPathDecomposition};
pub use error::{Error, Result};
pub use fault_index::{FtSccIndex, IndexStats, PathView, SweepReport};
pub use ftrs::{
    ftrs_provider, greedy_sparse_ftrs, trivial_ftrs, verification_cost, verify_ftrs, Ftrs,
    FtrsCounterexample, FtrsPair, FtrsReport, FtrsStrategy, DEFAULT_GREEDY_BUDGET,
};
pub use graph::{
    DirectedGraph, Edge, FailureSet, InducedSubgraph, SccPartition, SharedGraph, SplitGraph,
    VertexId,
};
pub use index_io::{
    deserialize_index, load_index, save_index, serialize_index, INDEX_MAGIC, INDEX_VERSION,
};
pub use path_scc::{PathMarks, PathQueryOptions, PathStructure};
pub use updates::{auxiliary_graph, query_with_updates, UpdateAuxiliary, UpdateSet};
