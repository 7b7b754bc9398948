//! The fault-tolerant SCC oracle: preprocess once, report the SCC
//! partition under any failure set within the budget.
//!
//! Preprocessing splits every vertex into an in/out pair so a vertex
//! failure becomes one edge failure, computes the SCCs of the split graph,
//! and builds, per nontrivial component: a DFS tree rooted at the
//! component's minimum-id vertex, its heavy path decomposition, and one
//! [`PathStructure`] per heavy path hosted on the induced subgraph of the
//! path head's DFS subtree.
//!
//! A query translates its failures into split edges and sweeps each
//! component's per-path structures in non-decreasing depth order. Every
//! SCC of the failed component intersects some heavy path inside the
//! subtree host of that path — sweeping shallow paths first guarantees
//! each SCC is complete the first time it is reported, so a group is kept
//! exactly when it contains a vertex not yet classified. Contracted back
//! through the split mapping, the kept groups partition the original
//! vertex set.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::decomposition::{DfsTree, HeavyPathDecomposition};
use crate::error::{Error, Result};
use crate::ftrs::{ftrs_provider, FtrsPair, FtrsStrategy};
use crate::graph::{
    DirectedGraph, Edge, FailureSet, SccPartition, SharedGraph, SplitGraph, VertexId,
};
use crate::path_scc::{PathQueryOptions, PathStructure};

/// One heavy path's query structure: the path, its host (the induced
/// subgraph of the path head's DFS subtree), and the subtree membership
/// needed to translate between component-local and host-local ids.
#[derive(Debug, Clone)]
pub(crate) struct PathDataStructure {
    /// Head of the heavy path, component-local id.
    pub(crate) head: VertexId,
    /// DFS depth of the head.
    pub(crate) depth: u32,
    /// The head's DFS subtree, component-local ids, ascending. Host-local
    /// id `i` of `structure` corresponds to `subtree[i]`.
    pub(crate) subtree: Vec<VertexId>,
    /// Per-path structure whose host is the subtree-induced subgraph.
    pub(crate) structure: PathStructure,
}

/// Everything stored for one nontrivial component of the split graph.
#[derive(Debug, Clone)]
pub(crate) struct ComponentStructures {
    /// Component-induced subgraph of the split graph, local ids; local id
    /// `i` corresponds to the component's `i`-th smallest split vertex.
    pub(crate) host: SharedGraph,
    pub(crate) dfs: DfsTree,
    pub(crate) decomposition: HeavyPathDecomposition,
    /// Sorted by (depth, head) — the order the sweep depends on.
    pub(crate) paths: Vec<PathDataStructure>,
}

/// One SCC of the split graph and its query structures (none when the
/// component is a single split vertex).
#[derive(Debug, Clone)]
pub(crate) struct ComponentIndex {
    /// Split-graph ids, ascending.
    pub(crate) vertices: Vec<VertexId>,
    pub(crate) structures: Option<ComponentStructures>,
}

/// The preprocessed oracle. Immutable after construction; queries are
/// read-only and use private scratch, so shared references may query
/// concurrently.
#[derive(Debug, Clone)]
pub struct FtSccIndex {
    pub(crate) k: u32,
    pub(crate) strategy: FtrsStrategy,
    pub(crate) original: SharedGraph,
    pub(crate) split: SharedGraph,
    /// Ordered by minimum split vertex (the canonical SCC order).
    pub(crate) components: Vec<ComponentIndex>,
    /// Per-split-vertex pairs against the whole split graph; present only
    /// when built with update support.
    pub(crate) update_pairs: Option<BTreeMap<VertexId, FtrsPair>>,
}

/// Size and shape summary of an index.
#[derive(Debug, Clone)]
pub struct IndexStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub k: u32,
    pub component_count: usize,
    pub nontrivial_component_count: usize,
    pub heavy_path_count: usize,
    /// Heavy path count per component, in component order (0 for
    /// singleton components).
    pub paths_per_component: Vec<usize>,
    /// Total edges across all stored reachability subgraphs (logical
    /// count; shared storage is counted once per reference).
    pub stored_subgraph_edges: usize,
    pub with_updates: bool,
}

/// Outcome of a single-component sweep run under an explicit path order —
/// the diagnostics behind the consistency properties the normal query
/// asserts. Produced by [`FtSccIndex::sweep_component`].
#[derive(Debug, Clone)]
pub struct SweepReport {
    /// Kept groups, split-graph ids, in the order the sweep found them.
    pub groups: Vec<Vec<VertexId>>,
    /// A reported group overlapped the classified set without being
    /// contained in it. Never happens in depth order; a violation shows
    /// the processing order was invalid.
    pub overlap_violation: bool,
    /// Every component vertex ended up classified.
    pub fully_covered: bool,
}

/// Read-only view of one stored per-path structure.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    /// Heavy path head, component-local id.
    pub head: VertexId,
    /// DFS depth of the head.
    pub depth: u32,
    /// The head's DFS subtree, component-local ids, ascending.
    pub subtree: &'a [VertexId],
    /// The per-path structure; its host is the subtree-induced subgraph.
    pub structure: &'a PathStructure,
}

impl FtSccIndex {
    /// Preprocesses `graph` for failure sets of at most `k` edges plus
    /// vertices. With `with_updates`, additionally stores a forward and
    /// backward reachability subgraph for every split vertex so that
    /// insertion queries can assemble their auxiliary graph.
    pub fn preprocess(
        graph: SharedGraph,
        k: u32,
        strategy: FtrsStrategy,
        with_updates: bool,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("failure budget k must be >= 1".to_string()));
        }
        let split: SharedGraph = Arc::new(graph.split_vertices().graph);
        let partition = split.tarjan_scc();
        let mut components = Vec::with_capacity(partition.components().len());
        for members in partition.components() {
            components.push(ComponentIndex::build(&split, members, k, strategy)?);
        }
        let update_pairs = if with_updates {
            let all: Vec<VertexId> = split.vertices().collect();
            Some(ftrs_provider(strategy, &split, &all, k)?)
        } else {
            None
        };
        Ok(FtSccIndex {
            k,
            strategy,
            original: graph,
            split,
            components,
            update_pairs,
        })
    }

    /// Reassembles an index from deserialized parts. `split` must be the
    /// vertex-split form of `original` (the loader derives it and shares
    /// it with the structures it rebuilds); the component lists must
    /// partition its vertices.
    pub(crate) fn from_parts(
        k: u32,
        strategy: FtrsStrategy,
        original: SharedGraph,
        split: SharedGraph,
        components: Vec<ComponentIndex>,
        update_pairs: Option<BTreeMap<VertexId, FtrsPair>>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::IndexFormat("k must be >= 1".to_string()));
        }
        if split.vertex_count() != 2 * original.vertex_count() {
            return Err(Error::IndexFormat(
                "split graph does not match the original".to_string(),
            ));
        }
        let mut seen = vec![false; split.vertex_count()];
        for comp in &components {
            for &v in &comp.vertices {
                if v.index() >= seen.len() || seen[v.index()] {
                    return Err(Error::IndexFormat(
                        "component lists do not partition the split graph".to_string(),
                    ));
                }
                seen[v.index()] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::IndexFormat(
                "component lists do not partition the split graph".to_string(),
            ));
        }
        Ok(FtSccIndex {
            k,
            strategy,
            original,
            split,
            components,
            update_pairs,
        })
    }

    /// The SCC partition of the original graph minus the failures.
    pub fn query(&self, failures: &FailureSet) -> Result<SccPartition> {
        self.query_with_options(failures, PathQueryOptions::default())
    }

    /// [`query`] with explicit per-path query options (debug checks).
    ///
    /// [`query`]: FtSccIndex::query
    pub fn query_with_options(
        &self,
        failures: &FailureSet,
        opts: PathQueryOptions,
    ) -> Result<SccPartition> {
        self.validate_failures(failures)?;
        let split_failed = SplitGraph::translate_failures(failures);
        let mut groups: Vec<Vec<VertexId>> = Vec::new();
        for comp in &self.components {
            let (split_groups, overlap, covered) = comp.sweep(&split_failed, opts, None)?;
            debug_assert!(!overlap, "depth-ordered sweep produced a partial overlap");
            debug_assert!(covered, "sweep left component vertices unclassified");
            for group in split_groups {
                let contracted = SplitGraph::contract(&group);
                // Groups holding only out-copies (their in-copies were cut
                // off) contract to nothing; the in-copy group reports the
                // vertex.
                if !contracted.is_empty() {
                    groups.push(contracted);
                }
            }
        }
        Ok(SccPartition::from_components(
            self.original.vertex_count(),
            groups,
        ))
    }

    /// Runs one component's sweep under an explicit path-processing order
    /// (any permutation of its path indices) and reports the consistency
    /// flags instead of asserting them. Exists so tests can demonstrate
    /// that orders violating the stored non-decreasing-depth order break
    /// the sweep's correctness argument.
    pub fn sweep_component(
        &self,
        component: usize,
        failures: &FailureSet,
        order: &[usize],
    ) -> Result<SweepReport> {
        self.validate_failures(failures)?;
        let comp = self
            .components
            .get(component)
            .ok_or_else(|| Error::Contract(format!("component {} out of range", component)))?;
        let path_count = comp.structures.as_ref().map_or(0, |s| s.paths.len());
        let mut seen = vec![false; path_count];
        let valid = order.len() == path_count
            && order
                .iter()
                .all(|&i| i < path_count && !std::mem::replace(&mut seen[i], true));
        if !valid {
            return Err(Error::Contract(format!(
                "order must be a permutation of 0..{}",
                path_count
            )));
        }
        let split_failed = SplitGraph::translate_failures(failures);
        let (groups, overlap_violation, fully_covered) =
            comp.sweep(&split_failed, PathQueryOptions::default(), Some(order))?;
        Ok(SweepReport {
            groups,
            overlap_violation,
            fully_covered,
        })
    }

    fn validate_failures(&self, failures: &FailureSet) -> Result<()> {
        if failures.len() > self.k as usize {
            return Err(Error::FailureBudgetExceeded {
                given: failures.len(),
                budget: self.k,
            });
        }
        for &e in failures.edges() {
            if !self.original.contains_edge(e) {
                return Err(Error::UnknownEdge(e));
            }
        }
        for &v in failures.vertices() {
            if !self.original.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn strategy(&self) -> FtrsStrategy {
        self.strategy
    }

    pub fn original(&self) -> &DirectedGraph {
        &self.original
    }

    pub fn original_arc(&self) -> &SharedGraph {
        &self.original
    }

    /// The vertex-split form the index is actually built on.
    pub fn split_graph(&self) -> &SharedGraph {
        &self.split
    }

    pub fn has_update_support(&self) -> bool {
        self.update_pairs.is_some()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Split-graph vertices of one component, ascending. Panics if
    /// `component` is out of range.
    pub fn component_vertices(&self, component: usize) -> &[VertexId] {
        &self.components[component].vertices
    }

    /// The component-induced host graph; `None` for singleton components.
    pub fn component_host(&self, component: usize) -> Option<&SharedGraph> {
        self.components[component]
            .structures
            .as_ref()
            .map(|s| &s.host)
    }

    pub fn component_dfs(&self, component: usize) -> Option<&DfsTree> {
        self.components[component]
            .structures
            .as_ref()
            .map(|s| &s.dfs)
    }

    pub fn component_decomposition(&self, component: usize) -> Option<&HeavyPathDecomposition> {
        self.components[component]
            .structures
            .as_ref()
            .map(|s| &s.decomposition)
    }

    /// Views of the component's per-path structures in stored (sweep)
    /// order; empty for singleton components.
    pub fn path_views(&self, component: usize) -> Vec<PathView<'_>> {
        match &self.components[component].structures {
            None => Vec::new(),
            Some(st) => st
                .paths
                .iter()
                .map(|p| PathView {
                    head: p.head,
                    depth: p.depth,
                    subtree: &p.subtree,
                    structure: &p.structure,
                })
                .collect(),
        }
    }

    pub fn stats(&self) -> IndexStats {
        let paths_per_component: Vec<usize> = self
            .components
            .iter()
            .map(|c| c.structures.as_ref().map_or(0, |s| s.paths.len()))
            .collect();
        let mut stored_subgraph_edges = 0;
        for comp in &self.components {
            if let Some(st) = &comp.structures {
                for p in &st.paths {
                    for pair in p.structure.pairs() {
                        stored_subgraph_edges += pair.fwd.edge_count() + pair.bwd.edge_count();
                    }
                }
            }
        }
        if let Some(pairs) = &self.update_pairs {
            for pair in pairs.values() {
                stored_subgraph_edges += pair.fwd.edge_count() + pair.bwd.edge_count();
            }
        }
        IndexStats {
            vertex_count: self.original.vertex_count(),
            edge_count: self.original.edge_count(),
            k: self.k,
            component_count: self.components.len(),
            nontrivial_component_count: self
                .components
                .iter()
                .filter(|c| c.structures.is_some())
                .count(),
            heavy_path_count: paths_per_component.iter().sum(),
            paths_per_component,
            stored_subgraph_edges,
            with_updates: self.update_pairs.is_some(),
        }
    }
}

impl ComponentIndex {
    fn build(
        split: &SharedGraph,
        members: &[VertexId],
        k: u32,
        strategy: FtrsStrategy,
    ) -> Result<Self> {
        let vertices = members.to_vec();
        if vertices.len() == 1 {
            return Ok(ComponentIndex {
                vertices,
                structures: None,
            });
        }
        let induced = split.induced_subgraph(&vertices)?;
        let host: SharedGraph = Arc::new(induced.graph);
        // The component is strongly connected, so any root reaches all of
        // it; the minimum split id (local 0) keeps construction
        // deterministic.
        let dfs = DfsTree::build(&host, VertexId(0))?;
        let decomposition = HeavyPathDecomposition::decompose(&dfs);
        let mut paths = Vec::with_capacity(decomposition.paths().len());
        for hp in decomposition.paths() {
            let head = hp.head();
            let subtree = dfs.subtree_vertices(head);
            let sub = host.induced_subgraph(&subtree)?;
            let sub_path: Vec<VertexId> = hp
                .vertices()
                .iter()
                .map(|&v| {
                    sub.sub_of(v)
                        .expect("heavy path lies in its head's subtree")
                })
                .collect();
            let sub_host: SharedGraph = Arc::new(sub.graph);
            let structure = PathStructure::build(sub_host, sub_path, k, strategy)?;
            paths.push(PathDataStructure {
                head,
                depth: hp.depth(),
                subtree,
                structure,
            });
        }
        Ok(ComponentIndex {
            vertices,
            structures: Some(ComponentStructures {
                host,
                dfs,
                decomposition,
                paths,
            }),
        })
    }

    /// Sweeps the per-path structures (in stored order, or `order` when
    /// given) and returns the kept groups in split-graph ids plus the
    /// consistency flags: whether any group partially overlapped the
    /// classified set, and whether the component ended fully classified.
    fn sweep(
        &self,
        split_failed: &[Edge],
        opts: PathQueryOptions,
        order: Option<&[usize]>,
    ) -> Result<(Vec<Vec<VertexId>>, bool, bool)> {
        let st = match &self.structures {
            None => return Ok((vec![self.vertices.clone()], false, true)),
            Some(st) => st,
        };
        // Failures with both endpoints in this component, component-local.
        let local_failed: Vec<Edge> = split_failed
            .iter()
            .filter_map(|e| {
                let src = position_in(&self.vertices, e.src)?;
                let dst = position_in(&self.vertices, e.dst)?;
                Some(Edge::new(src, dst))
            })
            .collect();
        let mut assigned = vec![false; self.vertices.len()];
        let mut groups: Vec<Vec<VertexId>> = Vec::new();
        let mut overlap = false;
        let stored_order: Vec<usize>;
        let indices: &[usize] = match order {
            Some(o) => o,
            None => {
                stored_order = (0..st.paths.len()).collect();
                &stored_order
            }
        };
        for &idx in indices {
            let pds = &st.paths[idx];
            // Only failures inside the subtree host can affect G(A)\F.
            let sub_failed: Vec<Edge> = local_failed
                .iter()
                .filter_map(|e| {
                    let src = position_in(&pds.subtree, e.src)?;
                    let dst = position_in(&pds.subtree, e.dst)?;
                    Some(Edge::new(src, dst))
                })
                .collect();
            for group in pds.structure.sccs_with_path_failures(&sub_failed, opts)? {
                let comp_group: Vec<VertexId> =
                    group.iter().map(|&v| pds.subtree[v.index()]).collect();
                let already = comp_group.iter().filter(|v| assigned[v.index()]).count();
                if already == comp_group.len() {
                    continue;
                }
                if already != 0 {
                    overlap = true;
                }
                for &v in &comp_group {
                    assigned[v.index()] = true;
                }
                groups.push(
                    comp_group
                        .iter()
                        .map(|&v| self.vertices[v.index()])
                        .collect(),
                );
            }
        }
        let fully_covered = assigned.iter().all(|&a| a);
        Ok((groups, overlap, fully_covered))
    }
}

/// Position of `v` in a sorted id list, as a local vertex id.
fn position_in(sorted: &[VertexId], v: VertexId) -> Option<VertexId> {
    sorted.binary_search(&v).ok().map(|i| VertexId(i as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> SharedGraph {
        Arc::new(DirectedGraph::parse("p 3 3\n0 1\n1 2\n2 0\n").unwrap())
    }

    fn index(graph: SharedGraph, k: u32) -> FtSccIndex {
        FtSccIndex::preprocess(graph, k, FtrsStrategy::Trivial, false).unwrap()
    }

    fn parts(p: &SccPartition) -> Vec<Vec<u32>> {
        p.components()
            .iter()
            .map(|c| c.iter().map(|v| v.0).collect())
            .collect()
    }

    #[test]
    fn rejects_zero_budget() {
        let err = FtSccIndex::preprocess(c3(), 0, FtrsStrategy::Trivial, false).unwrap_err();
        assert!(err.is_contract_violation());
    }

    #[test]
    fn cycle_preprocesses_to_one_path_over_the_split_cycle() {
        // Splitting C3 yields a 6-cycle; its DFS tree from vertex 0 is a
        // chain, so the decomposition is a single heavy path of length 6.
        let ix = index(c3(), 1);
        assert_eq!(ix.component_count(), 1);
        assert_eq!(ix.component_vertices(0).len(), 6);
        let views = ix.path_views(0);
        assert_eq!(views.len(), 1);
        assert_eq!(views[0].structure.path().len(), 6);
        assert_eq!(views[0].depth, 0);
        assert_eq!(ix.stats().heavy_path_count, 1);
    }

    #[test]
    fn edgeless_graph_is_all_singleton_components() {
        let g = Arc::new(DirectedGraph::parse("p 4 0\n").unwrap());
        let ix = index(g, 1);
        // Each vertex contributes two split singletons.
        assert_eq!(ix.component_count(), 8);
        assert_eq!(ix.stats().nontrivial_component_count, 0);
        assert_eq!(ix.stats().heavy_path_count, 0);
        let p = ix.query(&FailureSet::new()).unwrap();
        assert_eq!(parts(&p), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn no_failures_matches_static_sccs() {
        let g = Arc::new(DirectedGraph::parse("p 5 6\n0 1\n1 0\n1 2\n2 3\n3 2\n3 4\n").unwrap());
        let expected = g.tarjan_scc();
        let ix = index(g, 2);
        let got = ix.query(&FailureSet::new()).unwrap();
        assert_eq!(got.components(), expected.components());
    }

    #[test]
    fn edge_failure_splits_the_cycle() {
        let ix = index(c3(), 1);
        let p = ix.query(&FailureSet::from_edges([Edge::of(1, 2)])).unwrap();
        assert_eq!(parts(&p), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn vertex_failure_isolates_everything_in_a_cycle() {
        let ix = index(c3(), 1);
        let mut f = FailureSet::new();
        f.add_vertex(VertexId(1));
        let p = ix.query(&f).unwrap();
        assert_eq!(parts(&p), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn failure_validation() {
        let ix = index(c3(), 1);
        let err = ix
            .query(&FailureSet::from_edges([Edge::of(0, 1), Edge::of(1, 2)]))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::FailureBudgetExceeded {
                given: 2,
                budget: 1
            }
        ));
        let err = ix
            .query(&FailureSet::from_edges([Edge::of(0, 2)]))
            .unwrap_err();
        assert!(matches!(err, Error::UnknownEdge(e) if e == Edge::of(0, 2)));
        let mut f = FailureSet::new();
        f.add_vertex(VertexId(7));
        assert!(matches!(ix.query(&f), Err(Error::UnknownVertex(v)) if v == VertexId(7)));
    }

    #[test]
    fn mixed_component_sizes() {
        // A 2-cycle {0,1}, an isolated vertex 2, and an edge into the
        // cycle from 3.
        let g = Arc::new(DirectedGraph::parse("p 4 3\n0 1\n1 0\n3 0\n").unwrap());
        let ix = index(g, 1);
        let p = ix.query(&FailureSet::new()).unwrap();
        assert_eq!(parts(&p), vec![vec![0, 1], vec![2], vec![3]]);
        let p = ix.query(&FailureSet::from_edges([Edge::of(1, 0)])).unwrap();
        assert_eq!(parts(&p), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn sweep_component_reports_consistency_in_stored_order() {
        let ix = index(c3(), 1);
        let report = ix
            .sweep_component(0, &FailureSet::from_edges([Edge::of(0, 1)]), &[0])
            .unwrap();
        assert!(!report.overlap_violation);
        assert!(report.fully_covered);
        // Six split vertices, all singletons once the cycle is cut.
        assert_eq!(report.groups.len(), 6);
    }

    #[test]
    fn sweep_component_rejects_bad_orders() {
        let ix = index(c3(), 1);
        let f = FailureSet::new();
        assert!(ix.sweep_component(0, &f, &[]).is_err());
        assert!(ix.sweep_component(0, &f, &[0, 0]).is_err());
        assert!(ix.sweep_component(0, &f, &[1]).is_err());
        assert!(ix.sweep_component(9, &f, &[0]).is_err());
    }

    #[test]
    fn stats_reflect_shape() {
        let g = Arc::new(DirectedGraph::parse("p 4 3\n0 1\n1 0\n3 0\n").unwrap());
        let ix = index(g, 1);
        let stats = ix.stats();
        assert_eq!(stats.vertex_count, 4);
        assert_eq!(stats.edge_count, 3);
        assert_eq!(stats.k, 1);
        // {0,1} splits into one 4-vertex component; 2 and 3 contribute
        // two singletons each.
        assert_eq!(stats.component_count, 5);
        assert_eq!(stats.nontrivial_component_count, 1);
        assert!(!stats.with_updates);
        assert_eq!(stats.paths_per_component.len(), 5);
    }

    #[test]
    fn update_support_flag() {
        let plain = index(c3(), 1);
        assert!(!plain.has_update_support());
        let with = FtSccIndex::preprocess(c3(), 1, FtrsStrategy::Trivial, true).unwrap();
        assert!(with.has_update_support());
        // One pair per split vertex.
        assert_eq!(with.update_pairs.as_ref().unwrap().len(), 6);
    }
}
