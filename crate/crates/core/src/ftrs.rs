//! Fault-tolerant reachability subgraphs (FTRS).
//!
//! An FTRS for source `s` and budget `k` is a subgraph `H` of the host `G`
//! such that for every edge set `F` with `|F| <= k` and every vertex `v`,
//! `v` is reachable from `s` in `G\F` exactly when it is reachable in
//! `H\F`. Everything downstream (path queries, the full oracle) relies only
//! on this definition, never on how the subgraph was produced.
//!
//! Two providers are offered behind one interface: the *trivial* provider
//! returns the host itself (vacuously valid, shared by reference so it
//! costs one pointer per source), and a desk-scale *greedy* sparsifier that
//! removes edges while an exhaustive definitional check still passes. The
//! sub-quadratic constructions from the literature are intentionally not
//! implemented; their size guarantees are reported as metadata, never
//! assumed.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, SharedGraph, VertexId};

/// Work budget that comfortably covers hosts up to roughly n=12, m=40,
/// k=3 — the scale the exhaustive verifier and greedy sparsifier are meant
/// for.
pub const DEFAULT_GREEDY_BUDGET: u64 = 50_000_000;

/// How FTRS subgraphs are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtrsStrategy {
    /// Subgraph = host. Always valid, no sparsification.
    Trivial,
    /// Exhaustively verified greedy edge removal; refuses hosts where the
    /// verification work would exceed `budget` elementary steps.
    Greedy { budget: u64 },
}

impl FtrsStrategy {
    /// The greedy strategy with the default budget.
    pub fn greedy() -> Self {
        FtrsStrategy::Greedy {
            budget: DEFAULT_GREEDY_BUDGET,
        }
    }
}

/// A reachability-preserving subgraph for one source.
#[derive(Debug, Clone)]
pub struct Ftrs {
    source: VertexId,
    k: u32,
    graph: SharedGraph,
    host_fingerprint: u64,
}

impl Ftrs {
    /// Wraps an existing subgraph, validating the structural invariants:
    /// same vertex universe as the host and edge set contained in the
    /// host's. (Whether the subgraph truly preserves reachability is the
    /// verifier's job, not a construction invariant.)
    pub fn from_subgraph(
        host: &DirectedGraph,
        source: VertexId,
        k: u32,
        subgraph: DirectedGraph,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("failure budget k must be >= 1".to_string()));
        }
        if !host.contains_vertex(source) {
            return Err(Error::UnknownVertex(source));
        }
        if subgraph.vertex_count() != host.vertex_count() {
            return Err(Error::Contract(format!(
                "subgraph universe has {} vertices, host has {}",
                subgraph.vertex_count(),
                host.vertex_count()
            )));
        }
        if let Some(&extra) = subgraph.edges().iter().find(|&&e| !host.contains_edge(e)) {
            return Err(Error::Contract(format!(
                "subgraph edge {} does not exist in the host",
                extra
            )));
        }
        Ok(Ftrs {
            source,
            k,
            graph: Arc::new(subgraph),
            host_fingerprint: host.fingerprint(),
        })
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &SharedGraph {
        &self.graph
    }

    /// Fingerprint of the host this subgraph was built against.
    pub fn host_fingerprint(&self) -> u64 {
        self.host_fingerprint
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Maximum in-degree over all vertices — the sparsity figure the
    /// literature bounds by `2^k`; reported as metadata.
    pub fn max_in_degree(&self) -> usize {
        self.graph
            .vertices()
            .map(|v| self.graph.in_neighbors(v).len())
            .max()
            .unwrap_or(0)
    }
}

/// Forward and backward FTRS for one source: `fwd` answers "what does the
/// source reach", `bwd` (built over the reversed host) answers "what
/// reaches the source".
#[derive(Debug, Clone)]
pub struct FtrsPair {
    pub fwd: Ftrs,
    pub bwd: Ftrs,
}

impl FtrsPair {
    pub fn new(fwd: Ftrs, bwd: Ftrs) -> Result<Self> {
        if fwd.source() != bwd.source() || fwd.k() != bwd.k() {
            return Err(Error::Contract(
                "pair members must share source and k".to_string(),
            ));
        }
        Ok(FtrsPair { fwd, bwd })
    }

    pub fn source(&self) -> VertexId {
        self.fwd.source()
    }
}

/// The trivial provider: the host itself, shared by reference.
pub fn trivial_ftrs(host: &SharedGraph, source: VertexId, k: u32) -> Result<Ftrs> {
    if k == 0 {
        return Err(Error::Contract("failure budget k must be >= 1".to_string()));
    }
    if !host.contains_vertex(source) {
        return Err(Error::UnknownVertex(source));
    }
    Ok(Ftrs {
        source,
        k,
        graph: Arc::clone(host),
        host_fingerprint: host.fingerprint(),
    })
}

/// Number of elementary steps one exhaustive definitional check costs:
/// (number of failure sets of size <= k) x (one traversal of m+n+1 work).
pub fn verification_cost(m: usize, n: usize, k: u32) -> u128 {
    let mut sets: u128 = 0;
    let mut choose: u128 = 1; // C(m, i), maintained incrementally
    for i in 0..=(k as usize).min(m) {
        sets += choose;
        choose = choose * (m - i) as u128 / (i + 1) as u128;
    }
    sets * (m + n + 1) as u128
}

/// Finds the lexicographically first (by edge-index combination) failure
/// set under which host and candidate disagree about reachability from
/// `source`, or `None` if the candidate satisfies the definition.
fn definition_counterexample(
    host: &DirectedGraph,
    candidate: &DirectedGraph,
    source: VertexId,
    k: u32,
) -> Option<(Vec<Edge>, VertexId)> {
    let m = host.edge_count();
    for size in 0..=(k as usize).min(m) {
        for combo in (0..m).combinations(size) {
            let failed: Vec<Edge> = combo.iter().map(|&i| host.edges()[i]).collect();
            let host_mask = host.reachable_from_avoiding(source, &failed);
            let cand_mask = candidate.reachable_from_avoiding(source, &failed);
            if host_mask != cand_mask {
                let vertex = host_mask
                    .iter()
                    .zip(&cand_mask)
                    .position(|(a, b)| a != b)
                    .expect("masks differ");
                return Some((failed, VertexId(vertex as u32)));
            }
        }
    }
    None
}

/// Outcome of [`verify_ftrs`], serializable as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct FtrsReport {
    pub valid: bool,
    pub edge_count: usize,
    pub max_in_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<FtrsCounterexample>,
}

/// A concrete violation: under `failed_edges`, host and subgraph disagree
/// about whether `vertex` is reachable from the source.
#[derive(Debug, Clone, Serialize)]
pub struct FtrsCounterexample {
    pub failed_edges: Vec<Edge>,
    pub vertex: VertexId,
}

/// Exhaustively checks the FTRS definition: for every failure set of at
/// most `h.k()` host edges, reachability from the source must agree between
/// host and subgraph. Refuses hosts whose check would exceed `budget`.
pub fn verify_ftrs(host: &DirectedGraph, h: &Ftrs, budget: u64) -> Result<FtrsReport> {
    if h.host_fingerprint() != host.fingerprint() {
        return Err(Error::Contract(
            "subgraph was built against a different host graph".to_string(),
        ));
    }
    let required = verification_cost(host.edge_count(), host.vertex_count(), h.k());
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }
    let counterexample = definition_counterexample(host, h.graph(), h.source(), h.k()).map(
        |(failed_edges, vertex)| FtrsCounterexample {
            failed_edges,
            vertex,
        },
    );
    Ok(FtrsReport {
        valid: counterexample.is_none(),
        edge_count: h.edge_count(),
        max_in_degree: h.max_in_degree(),
        counterexample,
    })
}

/// Greedy sparsifier: scans host edges in descending id order and drops
/// each edge whose removal keeps the exhaustive definitional check passing.
/// The result is edge-minimal — removing any single remaining edge breaks
/// the definition — because validity of a subgraph is inherited downward:
/// once a removal fails the check it fails in every smaller subgraph too.
pub fn greedy_sparse_ftrs(
    host: &SharedGraph,
    source: VertexId,
    k: u32,
    budget: u64,
) -> Result<Ftrs> {
    if k == 0 {
        return Err(Error::Contract("failure budget k must be >= 1".to_string()));
    }
    if !host.contains_vertex(source) {
        return Err(Error::UnknownVertex(source));
    }
    let m = host.edge_count();
    let n = host.vertex_count();
    // One definitional check per candidate removal, plus the final
    // confirmation pass.
    let required = verification_cost(m, n, k) * (m as u128 + 1);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }
    let all = host.edges();
    let mut kept = vec![true; m];
    for idx in (0..m).rev() {
        kept[idx] = false;
        let candidate = DirectedGraph::from_edges(n, (0..m).filter(|&i| kept[i]).map(|i| all[i]))
            .expect("candidate edges come from the host");
        if definition_counterexample(host, &candidate, source, k).is_some() {
            kept[idx] = true;
        }
    }
    let graph = DirectedGraph::from_edges(n, (0..m).filter(|&i| kept[i]).map(|i| all[i]))
        .expect("kept edges come from the host");
    Ok(Ftrs {
        source,
        k,
        graph: Arc::new(graph),
        host_fingerprint: host.fingerprint(),
    })
}

/// Builds an [`FtrsPair`] per requested source: `fwd` against the host,
/// `bwd` against the reversed host. With the trivial strategy all pairs
/// share two graphs (host and its reversal); the greedy strategy owns its
/// sparsified graphs.
pub fn ftrs_provider(
    strategy: FtrsStrategy,
    host: &SharedGraph,
    sources: &[VertexId],
    k: u32,
) -> Result<BTreeMap<VertexId, FtrsPair>> {
    let reversed: SharedGraph = Arc::new(host.reversed());
    let mut out = BTreeMap::new();
    for &s in sources {
        let (fwd, bwd) = match strategy {
            FtrsStrategy::Trivial => (trivial_ftrs(host, s, k)?, trivial_ftrs(&reversed, s, k)?),
            FtrsStrategy::Greedy { budget } => (
                greedy_sparse_ftrs(host, s, k, budget)?,
                greedy_sparse_ftrs(&reversed, s, k, budget)?,
            ),
        };
        out.insert(s, FtrsPair::new(fwd, bwd)?);
    }
    Ok(out)
}
