//! Batched update queries: up to `k` deletions plus up to `k` edge
//! insertions in one shot.
//!
//! Deletions ride on the ordinary failure machinery. Insertions are
//! handled by an auxiliary graph `H` over the split universe: for every
//! endpoint copy of an inserted edge, `H` collects that vertex's stored
//! forward subgraph and its backward subgraph re-oriented forward, then
//! drops the deleted edges and adds the inserted ones. `H` preserves each
//! endpoint's SCC in the fully updated graph, so running a static SCC pass
//! over `H` and merging the base-query components contained in each
//! endpoint's SCC yields the partition of the updated graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fault_index::FtSccIndex;
use crate::graph::{DirectedGraph, Edge, FailureSet, SccPartition, SplitGraph, VertexId};

/// One update batch: deletions `X` (existing edges and vertices) and
/// insertions `Y` (edges over the existing vertex set; inserting an edge
/// that already exists, or one that `X` deletes, is allowed).
#[derive(Debug, Clone, Default)]
pub struct UpdateSet {
    pub deletions: FailureSet,
    pub insertions: Vec<Edge>,
}

impl UpdateSet {
    pub fn new(deletions: FailureSet, insertions: Vec<Edge>) -> Self {
        UpdateSet {
            deletions,
            insertions,
        }
    }
}

/// The auxiliary graph of one update query, plus the bookkeeping the
/// merge step and the tests need.
#[derive(Debug, Clone)]
pub struct UpdateAuxiliary {
    /// `H` minus the deleted edges plus the inserted ones, over the full
    /// split-graph universe.
    pub graph: DirectedGraph,
    /// The split copies whose SCCs drive the merge: for each inserted
    /// `(u,v)`, the out-copy of `u` and the in-copy of `v`; deduplicated,
    /// ascending.
    pub sources: Vec<VertexId>,
    /// Sanity bound: total stored-pair edge count over `sources` plus the
    /// number of inserted edges. `graph` never exceeds it.
    pub edge_bound: usize,
}

/// Builds the auxiliary graph for `u` from the index's stored per-vertex
/// subgraphs. Fails if the index was built without update support or `u`
/// violates its bounds.
pub fn auxiliary_graph(ix: &FtSccIndex, u: &UpdateSet) -> Result<UpdateAuxiliary> {
    let insertions = validate(ix, u)?;
    let pairs = ix.update_pairs.as_ref().ok_or(Error::UpdatesNotSupported)?;
    let deleted: Vec<Edge> = SplitGraph::translate_failures(&u.deletions);
    let mut sources: BTreeSet<VertexId> = BTreeSet::new();
    for e in &insertions {
        sources.insert(SplitGraph::out_copy(e.src));
        sources.insert(SplitGraph::in_copy(e.dst));
    }
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut edge_bound = insertions.len();
    for v in &sources {
        let pair = &pairs[v];
        edge_bound += pair.fwd.edge_count() + pair.bwd.edge_count();
        edges.extend(pair.fwd.graph().edges().iter().copied());
        // The backward subgraph lives over the reversed orientation; its
        // edges re-reverse into ordinary ones.
        edges.extend(pair.bwd.graph().edges().iter().map(|e| e.reversed()));
    }
    for e in &deleted {
        edges.remove(e);
    }
    // Inserted last so an edge that is both deleted and re-inserted
    // survives, matching the updated graph (G \ X) + Y.
    edges.extend(insertions.iter().map(|&e| SplitGraph::split_edge(e)));
    let graph = DirectedGraph::from_edges(ix.split_graph().vertex_count(), edges)?;
    Ok(UpdateAuxiliary {
        graph,
        sources: sources.into_iter().collect(),
        edge_bound,
    })
}

/// The SCC partition of the updated graph `(G \ X) + Y`.
pub fn query_with_updates(ix: &FtSccIndex, u: &UpdateSet) -> Result<SccPartition> {
    let insertions = validate(ix, u)?;
    let base = ix.query(&u.deletions)?;
    if insertions.is_empty() {
        return Ok(base);
    }
    let aux = auxiliary_graph(ix, u)?;
    let aux_partition = aux.graph.tarjan_scc();
    let mut dsu = Dsu::new(base.components().len());
    for &s in &aux.sources {
        let members = &aux_partition.components()[aux_partition.component_of(s)];
        // The source's SCC in the auxiliary graph equals its SCC in the
        // updated graph, which is a union of base components; merge them.
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        let anchor = base.component_of(SplitGraph::original_of(s));
        for &w in members {
            if SplitGraph::is_in_copy(w) {
                let comp = base.component_of(SplitGraph::original_of(w));
                touched.insert(comp);
                dsu.union(anchor, comp);
            }
        }
        debug_assert_eq!(
            touched
                .iter()
                .map(|&c| base.components()[c].len())
                .sum::<usize>(),
            members
                .iter()
                .filter(|&&w| SplitGraph::is_in_copy(w))
                .count(),
            "auxiliary SCC is not a union of base components"
        );
    }
    let mut merged: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for (i, comp) in base.components().iter().enumerate() {
        merged
            .entry(dsu.find(i))
            .or_default()
            .extend(comp.iter().copied());
    }
    Ok(SccPartition::from_components(
        ix.original().vertex_count(),
        merged.into_values().collect(),
    ))
}

/// Checks bounds and membership; returns the deduplicated insertions.
fn validate(ix: &FtSccIndex, u: &UpdateSet) -> Result<Vec<Edge>> {
    if !ix.has_update_support() {
        return Err(Error::UpdatesNotSupported);
    }
    if u.deletions.len() > ix.k() as usize {
        return Err(Error::FailureBudgetExceeded {
            given: u.deletions.len(),
            budget: ix.k(),
        });
    }
    for &e in u.deletions.edges() {
        if !ix.original().contains_edge(e) {
            return Err(Error::UnknownEdge(e));
        }
    }
    for &v in u.deletions.vertices() {
        if !ix.original().contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
    }
    let mut insertions = u.insertions.clone();
    insertions.sort_unstable();
    insertions.dedup();
    if insertions.len() > ix.k() as usize {
        return Err(Error::Contract(format!(
            "too many insertions: {} supplied, index supports at most {}",
            insertions.len(),
            ix.k()
        )));
    }
    for e in &insertions {
        for v in [e.src, e.dst] {
            if !ix.original().contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
    }
    Ok(insertions)
}

/// Union-find over base component indices.
struct Dsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut x = x as u32;
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x as usize
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (a, b) = if self.rank[a] < self.rank[b] {
            (b, a)
        } else {
            (a, b)
        };
        self.parent[b] = a as u32;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}
