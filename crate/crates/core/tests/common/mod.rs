//! Shared helpers for the integration suites: seeded graph generators and
//! independent brute-force oracles. The oracles deliberately avoid the
//! library's traversal code — they build their own adjacency from the raw
//! edge list — so a bug in the library cannot hide in its own oracle.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
pub use rand::Rng;
use rand::SeedableRng;

use ftscc_core::{DirectedGraph, Edge, FailureSet, SccPartition, SplitGraph, VertexId};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random simple digraph: up to `m` distinct edges, no self-loops.
pub fn random_digraph(rng: &mut StdRng, n: usize, m: usize) -> DirectedGraph {
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u != v {
            edges.push(Edge::of(u, v));
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated endpoints are valid")
}

/// Random strongly connected digraph: a random Hamiltonian cycle plus
/// `extra` random edges.
pub fn random_strongly_connected(rng: &mut StdRng, n: usize, extra: usize) -> DirectedGraph {
    assert!(n >= 1);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(n + extra);
    if n > 1 {
        for i in 0..n {
            edges.push(Edge::of(order[i], order[(i + 1) % n]));
        }
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u != v {
            edges.push(Edge::of(u, v));
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated endpoints are valid")
}

/// Random arborescence rooted at 0, as a digraph with edges parent→child —
/// every vertex reachable from the root, so a DFS tree exists.
pub fn random_tree_graph(rng: &mut StdRng, n: usize) -> DirectedGraph {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n as u32 {
        let parent = rng.random_range(0..v);
        edges.push(Edge::of(parent, v));
    }
    DirectedGraph::from_edges(n, edges).expect("generated endpoints are valid")
}

/// A random failure set for `g`: `count` members, each an existing edge or
/// (with `vertex_prob`) a vertex.
pub fn random_failures(
    rng: &mut StdRng,
    g: &DirectedGraph,
    count: usize,
    vertex_prob: f64,
) -> FailureSet {
    let mut f = FailureSet::new();
    let m = g.edge_count();
    for _ in 0..count {
        if g.vertex_count() > 0 && rng.random_bool(vertex_prob) {
            f.add_vertex(VertexId(rng.random_range(0..g.vertex_count() as u32)));
        } else if m > 0 {
            f.add_edge(g.edges()[rng.random_range(0..m)]);
        }
    }
    f
}

/// A random simple path in `g` (vertices distinct, consecutive pairs are
/// edges), at most `max_len` vertices. Always nonempty.
pub fn random_simple_path(rng: &mut StdRng, g: &DirectedGraph, max_len: usize) -> Vec<VertexId> {
    let start = VertexId(rng.random_range(0..g.vertex_count() as u32));
    let mut on_path = vec![false; g.vertex_count()];
    let mut path = vec![start];
    on_path[start.index()] = true;
    while path.len() < max_len {
        let last = *path.last().expect("path is nonempty");
        let next: Vec<VertexId> = g
            .out_neighbors(last)
            .iter()
            .copied()
            .filter(|w| !on_path[w.index()])
            .collect();
        if next.is_empty() {
            break;
        }
        let w = next[rng.random_range(0..next.len())];
        on_path[w.index()] = true;
        path.push(w);
    }
    path
}

// ---------------------------------------------------------------------
// Independent oracles.
// ---------------------------------------------------------------------

/// Own adjacency lists from a raw edge list.
fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.src.index()].push(e.dst.index());
    }
    adj
}

/// BFS over a raw edge list.
pub fn oracle_reach(n: usize, edges: &[Edge], s: VertexId) -> Vec<bool> {
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    seen[s.index()] = true;
    let mut queue = vec![s.index()];
    while let Some(v) = queue.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push(w);
            }
        }
    }
    seen
}

/// SCC partition of a raw edge list by pairwise reachability closure:
/// `u ~ v` iff each reaches the other. Canonical form: members sorted,
/// components ordered by minimum member.
pub fn closure_scc(n: usize, edges: &[Edge]) -> Vec<Vec<VertexId>> {
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|v| oracle_reach(n, edges, VertexId(v as u32)))
        .collect();
    let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    // The reachability matrix is indexed from both sides, so the index
    // loop reads better than enumerate here.
    #[allow(clippy::needless_range_loop)]
    for v in 0..n {
        let rep = (0..n)
            .find(|&u| reach[u][v] && reach[v][u])
            .expect("v is in its own SCC");
        groups.entry(rep).or_default().push(VertexId(v as u32));
    }
    groups.into_values().collect()
}

/// The edges of `g` that survive `f`: failed edges are dropped, and so is
/// every edge incident to a failed vertex.
pub fn surviving_edges(g: &DirectedGraph, f: &FailureSet) -> Vec<Edge> {
    g.edges()
        .iter()
        .copied()
        .filter(|e| {
            !f.edges().contains(e)
                && !f.vertices().contains(&e.src)
                && !f.vertices().contains(&e.dst)
        })
        .collect()
}

/// Ground-truth SCC partition of `g` minus the failures. Failed vertices
/// come out as singletons.
pub fn oracle_partition(g: &DirectedGraph, f: &FailureSet) -> Vec<Vec<VertexId>> {
    closure_scc(g.vertex_count(), &surviving_edges(g, f))
}

/// Ground-truth SCC partition after a full update batch: deletions as in
/// [`oracle_partition`], then insertions — except that edges incident to a
/// failed vertex stay dead, because no cycle can pass through the failed
/// vertex.
pub fn oracle_updated_partition(
    g: &DirectedGraph,
    deletions: &FailureSet,
    insertions: &[Edge],
) -> Vec<Vec<VertexId>> {
    let mut edges = surviving_edges(g, deletions);
    for e in insertions {
        if !deletions.vertices().contains(&e.src) && !deletions.vertices().contains(&e.dst) {
            edges.push(*e);
        }
    }
    closure_scc(g.vertex_count(), &edges)
}

/// The fully updated split graph: split edges minus the translated
/// deletions plus the translated insertions. Lemma-level assertions about
/// per-vertex SCC equality run against this graph.
pub fn updated_split_graph(
    g: &DirectedGraph,
    deletions: &FailureSet,
    insertions: &[Edge],
) -> DirectedGraph {
    let split = g.split_vertices().graph;
    let removed = SplitGraph::translate_failures(deletions);
    let mut edges: Vec<Edge> = split
        .edges()
        .iter()
        .copied()
        .filter(|e| !removed.contains(e))
        .collect();
    edges.extend(insertions.iter().map(|&e| SplitGraph::split_edge(e)));
    DirectedGraph::from_edges(split.vertex_count(), edges).expect("split ids are valid")
}

/// All size-≤-k subsets of `0..m`, as index vectors.
pub fn subsets_up_to(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for base in &frontier {
            let start = base.last().map_or(0, |&i| i + 1);
            for i in start..m {
                let mut s = base.clone();
                s.push(i);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Independent definitional check of a fault-tolerant reachability
/// subgraph: for every failure set of at most `k` host edges, the
/// reachable set from `source` must agree between host-minus-F and
/// candidate-minus-F. Returns the first violation as (failed edges,
/// differing vertex).
pub fn ftrs_violation(
    host: &DirectedGraph,
    candidate_edges: &[Edge],
    source: VertexId,
    k: u32,
) -> Option<(Vec<Edge>, VertexId)> {
    let n = host.vertex_count();
    let host_edges = host.edges();
    for subset in subsets_up_to(host_edges.len(), k as usize) {
        let failed: Vec<Edge> = subset.iter().map(|&i| host_edges[i]).collect();
        let h_edges: Vec<Edge> = host_edges
            .iter()
            .copied()
            .filter(|e| !failed.contains(e))
            .collect();
        let c_edges: Vec<Edge> = candidate_edges
            .iter()
            .copied()
            .filter(|e| !failed.contains(e))
            .collect();
        let a = oracle_reach(n, &h_edges, source);
        let b = oracle_reach(n, &c_edges, source);
        if let Some(v) = (0..n).find(|&v| a[v] != b[v]) {
            return Some((failed, VertexId(v as u32)));
        }
    }
    None
}

/// Library partition as plain sorted vectors for comparison against the
/// oracles.
pub fn parts(p: &SccPartition) -> Vec<Vec<VertexId>> {
    p.components().to_vec()
}

/// Asserts a library partition equals an oracle partition, with a
/// readable diff on failure.
pub fn assert_partition_matches(got: &SccPartition, expected: &[Vec<VertexId>], context: &str) {
    assert_eq!(got.components(), expected, "partition mismatch ({context})");
}
