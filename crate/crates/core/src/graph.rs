//! Directed-graph representation, the static SCC baseline, reachability
//! primitives, and the vertex-splitting transform.
//!
//! [`DirectedGraph`] is the universe every other module operates on. It is
//! immutable after construction and keeps adjacency lists sorted by ascending
//! neighbor id, so traversals — and everything derived from them — are
//! deterministic and reproducible across runs.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense 0-based vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn new(id: u32) -> Self {
        VertexId(id)
    }

    /// The id as a usize, for indexing per-vertex arrays.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed edge `src -> dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
}

impl Edge {
    pub fn new(src: VertexId, dst: VertexId) -> Self {
        Edge { src, dst }
    }

    /// Convenience constructor from raw ids.
    pub fn of(src: u32, dst: u32) -> Self {
        Edge::new(VertexId(src), VertexId(dst))
    }

    /// The same edge with its direction flipped.
    pub fn reversed(self) -> Self {
        Edge::new(self.dst, self.src)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.src, self.dst)
    }
}

/// An immutable directed graph with deterministic adjacency order.
///
/// Edges are stored deduplicated and sorted by `(src, dst)`; `out_adj` and
/// `in_adj` list neighbors in ascending id order. Self-loops are retained
/// (they never affect SCC membership). Parallel edges are collapsed at
/// construction because failure sets are defined over edge *identities*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    fingerprint: u64,
}

impl DirectedGraph {
    /// Builds a graph on `n` vertices from an arbitrary edge collection.
    /// Duplicates are collapsed; endpoints are validated against `n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list: Vec<Edge> = edges.into_iter().collect();
        for e in &list {
            if e.src.index() >= n {
                return Err(Error::UnknownVertex(e.src));
            }
            if e.dst.index() >= n {
                return Err(Error::UnknownVertex(e.dst));
            }
        }
        list.sort_unstable();
        list.dedup();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &list {
            out_adj[e.src.index()].push(e.dst);
        }
        // Scanning edges in (src, dst) order fills each in_adj list in
        // ascending src order, keeping both adjacency directions sorted.
        for e in &list {
            in_adj[e.dst.index()].push(e.src);
        }
        let mut h = Fnv64::new();
        h.write_u64(n as u64);
        h.write_u64(list.len() as u64);
        for e in &list {
            h.write_u32(e.src.0);
            h.write_u32(e.dst.0);
        }
        Ok(DirectedGraph {
            n,
            edges: list,
            out_adj,
            in_adj,
            fingerprint: h.finish(),
        })
    }

    /// Parses the text graph format: optional `#` comment lines, a header
    /// `p <n> <m>`, then exactly `m` lines `u v`. Vertex ids must already be
    /// dense (`0 <= id < n`); see [`DirectedGraph::parse_with_remap`] for
    /// documents with arbitrary ids. Duplicate edge lines are collapsed.
    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawDocument::parse(text)?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for &(line, u, v) in &raw.edges {
            let check = |id: u64| -> Result<VertexId> {
                if id >= raw.n as u64 {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "vertex id {} out of range (graph declares n={})",
                            id, raw.n
                        ),
                    });
                }
                Ok(VertexId(id as u32))
            };
            edges.push(Edge::new(check(u)?, check(v)?));
        }
        DirectedGraph::from_edges(raw.n, edges)
    }

    /// Parses a document whose vertices use arbitrary non-negative ids.
    /// Distinct ids are mapped to dense ids in ascending order; the returned
    /// table maps each dense id back to its original (`table[dense] =
    /// original`). The declared `n` may exceed the number of distinct ids,
    /// in which case the trailing dense ids are isolated vertices.
    pub fn parse_with_remap(text: &str) -> Result<(Self, Vec<u64>)> {
        let raw = RawDocument::parse(text)?;
        let mut ids: BTreeSet<u64> = BTreeSet::new();
        for &(_, u, v) in &raw.edges {
            ids.insert(u);
            ids.insert(v);
        }
        if ids.len() > raw.n {
            return Err(Error::Parse {
                line: raw.header_line,
                message: format!(
                    "declared n={} but the document references {} distinct vertex ids",
                    raw.n,
                    ids.len()
                ),
            });
        }
        let table: Vec<u64> = ids.into_iter().collect();
        let dense = |id: u64| -> VertexId {
            let pos = table.binary_search(&id).expect("id was collected above");
            VertexId(pos as u32)
        };
        let edges: Vec<Edge> = raw
            .edges
            .iter()
            .map(|&(_, u, v)| Edge::new(dense(u), dense(v)))
            .collect();
        let graph = DirectedGraph::from_edges(raw.n, edges)?;
        Ok((graph, table))
    }

    /// Renders the graph back into the text format accepted by [`parse`].
    ///
    /// [`parse`]: DirectedGraph::parse
    pub fn to_document(&self) -> String {
        let mut out = format!("p {} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.src, e.dst));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges, sorted by `(src, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Iterates over all vertex ids in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n as u32).map(VertexId)
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v.index()]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v.index()]
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.index() < self.n
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        e.src.index() < self.n && self.out_adj[e.src.index()].binary_search(&e.dst).is_ok()
    }

    /// Stable 64-bit identity of the graph (FNV-1a over the canonical edge
    /// list, computed once at construction). Used to tie derived structures
    /// back to the host they were built against.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Copy of the graph without the failed edges. Hands back an error if a
    /// failed edge does not exist or if the failure set names vertices —
    /// vertex failures are handled by [`split_vertices`], never here.
    ///
    /// [`split_vertices`]: DirectedGraph::split_vertices
    pub fn delete_edges(&self, failures: &FailureSet) -> Result<Self> {
        if !failures.vertices().is_empty() {
            return Err(Error::VertexFailureInDelete);
        }
        for &e in failures.edges() {
            if !self.contains_edge(e) {
                return Err(Error::UnknownEdge(e));
            }
        }
        let remaining = self
            .edges
            .iter()
            .copied()
            .filter(|e| !failures.edges().contains(e));
        DirectedGraph::from_edges(self.n, remaining)
    }

    /// The subgraph induced by `members`, with a bidirectional id mapping.
    /// Runs in time proportional to the members' degree sum, not the full
    /// edge count, so per-subtree hosts can be carved out cheaply.
    pub fn induced_subgraph(&self, members: &[VertexId]) -> Result<InducedSubgraph> {
        let mut to_host: Vec<VertexId> = members.to_vec();
        to_host.sort_unstable();
        to_host.dedup();
        for &v in &to_host {
            if !self.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut to_sub: Vec<Option<VertexId>> = vec![None; self.n];
        for (sub, &host) in to_host.iter().enumerate() {
            to_sub[host.index()] = Some(VertexId(sub as u32));
        }
        let mut edges = Vec::new();
        for (sub, &host) in to_host.iter().enumerate() {
            for &w in self.out_neighbors(host) {
                if let Some(ws) = to_sub[w.index()] {
                    edges.push(Edge::new(VertexId(sub as u32), ws));
                }
            }
        }
        let graph = DirectedGraph::from_edges(to_host.len(), edges)
            .expect("induced endpoints are valid by construction");
        Ok(InducedSubgraph {
            graph,
            to_host,
            to_sub,
        })
    }

    /// The graph with every edge flipped.
    pub fn reversed(&self) -> Self {
        let edges = self.edges.iter().map(|e| e.reversed());
        DirectedGraph::from_edges(self.n, edges).expect("reversal preserves endpoint validity")
    }

    /// Forward-reachability mask from `s` (always contains `s`).
    pub fn reachable_from(&self, s: VertexId) -> Vec<bool> {
        self.reachable_from_avoiding(s, &[])
    }

    /// Forward-reachability mask from `s` with the listed edges treated as
    /// absent. Edges not present in the graph are ignored.
    pub fn reachable_from_avoiding(&self, s: VertexId, failed: &[Edge]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        if !self.contains_vertex(s) {
            return seen;
        }
        seen[s.index()] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in self.out_neighbors(v) {
                if !seen[w.index()] && !failed.contains(&Edge::new(v, w)) {
                    seen[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Exact SCC partition via Tarjan's algorithm (iterative, explicit work
    /// stack). This is both the static baseline that queries are verified
    /// against and the routine used on small auxiliary graphs.
    pub fn tarjan_scc(&self) -> SccPartition {
        const UNSET: u32 = u32::MAX;
        let n = self.n;
        let mut order = vec![UNSET; n]; // discovery order
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut frames: Vec<(u32, usize)> = Vec::new();
        let mut next = 0u32;
        let mut components: Vec<Vec<VertexId>> = Vec::new();

        for start in 0..n as u32 {
            if order[start as usize] != UNSET {
                continue;
            }
            order[start as usize] = next;
            low[start as usize] = next;
            next += 1;
            stack.push(start);
            on_stack[start as usize] = true;
            frames.push((start, 0));
            while let Some(&mut (v, ref mut cursor)) = frames.last_mut() {
                let out = &self.out_adj[v as usize];
                if *cursor < out.len() {
                    let w = out[*cursor].0;
                    *cursor += 1;
                    if order[w as usize] == UNSET {
                        order[w as usize] = next;
                        low[w as usize] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        frames.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(order[w as usize]);
                    }
                } else {
                    frames.pop();
                    if let Some(&mut (p, _)) = frames.last_mut() {
                        low[p as usize] = low[p as usize].min(low[v as usize]);
                    }
                    if low[v as usize] == order[v as usize] {
                        let mut component = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w as usize] = false;
                            component.push(VertexId(w));
                            if w == v {
                                break;
                            }
                        }
                        components.push(component);
                    }
                }
            }
        }
        SccPartition::from_components(n, components)
    }

    /// The vertex-splitting transform: every vertex `v` becomes the edge
    /// `v_in -> v_out`, incoming edges attach to `v_in`, outgoing edges
    /// leave from `v_out`. A vertex failure in the original graph is then
    /// exactly an edge failure (of the splitter edge) in the split graph.
    pub fn split_vertices(&self) -> SplitGraph {
        let mut edges = Vec::with_capacity(self.n + self.edges.len());
        for v in self.vertices() {
            edges.push(SplitGraph::splitter_edge(v));
        }
        for &e in &self.edges {
            edges.push(SplitGraph::split_edge(e));
        }
        let graph = DirectedGraph::from_edges(2 * self.n, edges)
            .expect("split ids are within 2n by construction");
        SplitGraph {
            graph,
            original_n: self.n,
        }
    }
}

/// Raw parsed document: header plus `(line, src, dst)` triples.
struct RawDocument {
    n: usize,
    header_line: usize,
    edges: Vec<(usize, u64, u64)>,
}

impl RawDocument {
    fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut edges: Vec<(usize, u64, u64)> = Vec::new();
        let mut last_line = 0;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            match header {
                None => {
                    if tokens.len() != 3 || tokens[0] != "p" {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("expected header \"p <n> <m>\", found \"{}\"", body),
                        });
                    }
                    let parse_count = |tok: &str| -> Result<usize> {
                        tok.parse::<usize>().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid count \"{}\" in header", tok),
                        })
                    };
                    header = Some((line_no, parse_count(tokens[1])?, parse_count(tokens[2])?));
                }
                Some((_, _, m)) => {
                    if edges.len() == m {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("unexpected line; header declared {} edges", m),
                        });
                    }
                    if tokens.len() != 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("expected \"<u> <v>\", found \"{}\"", body),
                        });
                    }
                    let parse_id = |tok: &str| -> Result<u64> {
                        tok.parse::<u64>().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid vertex id \"{}\"", tok),
                        })
                    };
                    edges.push((line_no, parse_id(tokens[0])?, parse_id(tokens[1])?));
                }
            }
        }
        let (header_line, n, m) = header.ok_or(Error::Parse {
            line: 1,
            message: "empty document: missing \"p <n> <m>\" header".to_string(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: last_line + 1,
                message: format!("header declared {} edges but found {}", m, edges.len()),
            });
        }
        Ok(RawDocument {
            n,
            header_line,
            edges,
        })
    }
}

/// A set of failed edges and/or failed vertices, checked against an index's
/// failure budget `k` at query time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureSet {
    edges: BTreeSet<Edge>,
    vertices: BTreeSet<VertexId>,
}

impl FailureSet {
    pub fn new() -> Self {
        FailureSet::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        FailureSet {
            edges: edges.into_iter().collect(),
            vertices: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, e: Edge) -> &mut Self {
        self.edges.insert(e);
        self
    }

    pub fn add_vertex(&mut self, v: VertexId) -> &mut Self {
        self.vertices.insert(v);
        self
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Total failure count — edges and vertices each cost one unit of the
    /// budget.
    pub fn len(&self) -> usize {
        self.edges.len() + self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.vertices.is_empty()
    }
}

/// A partition of the vertex set into strongly connected components, in
/// canonical form: each component sorted ascending, components ordered by
/// their representative (minimum member).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccPartition {
    components: Vec<Vec<VertexId>>,
    #[serde(skip)]
    component_of: Vec<u32>,
}

impl SccPartition {
    /// Canonicalizes an arbitrary component list. The components must be
    /// pairwise disjoint and cover `0..n` exactly.
    pub fn from_components(n: usize, mut components: Vec<Vec<VertexId>>) -> Self {
        for c in &mut components {
            c.sort_unstable();
        }
        components.sort_unstable_by_key(|c| c.first().copied());
        let mut component_of = vec![u32::MAX; n];
        for (i, c) in components.iter().enumerate() {
            for &v in c {
                debug_assert_eq!(
                    component_of[v.index()],
                    u32::MAX,
                    "vertex {} appears in two components",
                    v
                );
                component_of[v.index()] = i as u32;
            }
        }
        debug_assert!(
            component_of.iter().all(|&c| c != u32::MAX),
            "partition does not cover the vertex set"
        );
        SccPartition {
            components,
            component_of,
        }
    }

    pub fn components(&self) -> &[Vec<VertexId>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v.index()] as usize
    }

    pub fn component(&self, i: usize) -> &[VertexId] {
        &self.components[i]
    }

    /// The minimum vertex id of component `i`.
    pub fn representative(&self, i: usize) -> VertexId {
        self.components[i][0]
    }

    pub fn vertex_count(&self) -> usize {
        self.component_of.len()
    }

    /// True when the two partitions cover the same universe and every
    /// component of `self` is contained in a single component of `coarser`.
    pub fn is_refinement_of(&self, coarser: &SccPartition) -> bool {
        if self.component_of.len() != coarser.component_of.len() {
            return false;
        }
        self.components.iter().all(|c| {
            let target = coarser.component_of(c[0]);
            c.iter().all(|&v| coarser.component_of(v) == target)
        })
    }

    /// Serializes to the canonical JSON form
    /// `{"components":[[ids...],...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serialization cannot fail")
    }
}

/// Result of [`DirectedGraph::induced_subgraph`]: the subgraph plus the
/// bidirectional id mapping between host and subgraph.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    /// The induced subgraph, over dense local ids `0..members.len()`.
    pub graph: DirectedGraph,
    /// `to_host[local] = host id`; ascending, so local order mirrors host
    /// order.
    pub to_host: Vec<VertexId>,
    /// `to_sub[host] = Some(local)` for members, `None` otherwise.
    pub to_sub: Vec<Option<VertexId>>,
}

impl InducedSubgraph {
    pub fn host_of(&self, local: VertexId) -> VertexId {
        self.to_host[local.index()]
    }

    pub fn sub_of(&self, host: VertexId) -> Option<VertexId> {
        self.to_sub[host.index()]
    }
}

/// Result of [`DirectedGraph::split_vertices`]. The mapping between
/// original and split ids is positional (`v_in = 2v`, `v_out = 2v+1`), so
/// the map accessors are pure functions rather than stored tables.
#[derive(Debug, Clone)]
pub struct SplitGraph {
    /// The split graph on `2n` vertices.
    pub graph: DirectedGraph,
    /// Vertex count of the graph that was split.
    pub original_n: usize,
}

impl SplitGraph {
    /// The in-copy of an original vertex.
    pub fn in_copy(v: VertexId) -> VertexId {
        VertexId(2 * v.0)
    }

    /// The out-copy of an original vertex.
    pub fn out_copy(v: VertexId) -> VertexId {
        VertexId(2 * v.0 + 1)
    }

    /// Where an original edge `(u,v)` lands in the split graph:
    /// `(u_out, v_in)`.
    pub fn split_edge(e: Edge) -> Edge {
        Edge::new(Self::out_copy(e.src), Self::in_copy(e.dst))
    }

    /// The splitter edge `(v_in, v_out)` representing vertex `v` itself;
    /// deleting it is equivalent to failing the vertex.
    pub fn splitter_edge(v: VertexId) -> Edge {
        Edge::new(Self::in_copy(v), Self::out_copy(v))
    }

    /// The original vertex a split vertex belongs to.
    pub fn original_of(split: VertexId) -> VertexId {
        VertexId(split.0 / 2)
    }

    /// True for in-copies. Exactly one split vertex per original vertex is
    /// an in-copy, so filtering on this contracts split sets back to
    /// original vertex sets without duplicates.
    pub fn is_in_copy(split: VertexId) -> bool {
        split.0.is_multiple_of(2)
    }

    /// Translates a failure set over the original graph into split-graph
    /// edges: each failed edge becomes its split image, each failed vertex
    /// becomes its splitter edge.
    pub fn translate_failures(failures: &FailureSet) -> Vec<Edge> {
        let mut out: Vec<Edge> = failures
            .edges()
            .iter()
            .map(|&e| Self::split_edge(e))
            .collect();
        out.extend(failures.vertices().iter().map(|&v| Self::splitter_edge(v)));
        out.sort_unstable();
        out
    }

    /// Contracts a set of split vertices back to original vertices by
    /// keeping in-copies only. SCCs of the split graph always contain the
    /// in-copy of every original vertex they touch, so this loses nothing.
    pub fn contract(split_vertices: &[VertexId]) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = split_vertices
            .iter()
            .copied()
            .filter(|&v| Self::is_in_copy(v))
            .map(Self::original_of)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Incremental FNV-1a 64-bit hasher; used for graph fingerprints and the
/// index-file checksum. Hand-rolled because the exact byte-level definition
/// must stay stable across platforms and dependency upgrades.
pub(crate) struct Fnv64 {
    state: u64,
}

impl Fnv64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn new() -> Self {
        Fnv64 {
            state: Self::OFFSET,
        }
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= b as u64;
            self.state = self.state.wrapping_mul(Self::PRIME);
        }
    }

    pub fn write_u32(&mut self, v: u32) {
        self.write(&v.to_le_bytes());
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.state
    }
}

/// Shared handle to an immutable graph; derived structures store these so
/// that the trivial reachability provider costs one pointer per source
/// instead of one graph copy per source.
pub type SharedGraph = Arc<DirectedGraph>;
