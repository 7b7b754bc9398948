//! DFS tree construction and heavy-path decomposition.
//!
//! The oracle sweeps heavy paths in non-decreasing depth order, so the
//! decomposition stores its paths pre-sorted that way. Determinism matters
//! throughout: DFS explores children in ascending id order and heavy-child
//! ties break toward the minimum id, making every derived structure
//! reproducible for identical inputs.

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId};

const UNVISITED: u32 = u32::MAX;

/// A rooted DFS tree with visit/finish times, depths, and subtree sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    visit: Vec<u32>,
    finish: Vec<u32>,
    subtree_size: Vec<u32>,
    depth: Vec<u32>,
}

impl DfsTree {
    /// Runs a DFS from `root`, exploring out-neighbors in ascending id
    /// order. Every vertex must be reachable from `root`; the caller (the
    /// per-SCC driver) guarantees this, and violations are reported with a
    /// witness vertex.
    pub fn build(graph: &DirectedGraph, root: VertexId) -> Result<Self> {
        let n = graph.vertex_count();
        if !graph.contains_vertex(root) {
            return Err(Error::UnknownVertex(root));
        }
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut visit = vec![UNVISITED; n];
        let mut finish = vec![0u32; n];
        let mut subtree_size = vec![1u32; n];
        let mut depth = vec![0u32; n];

        let mut clock = 0u32;
        visit[root.index()] = clock;
        clock += 1;
        let mut frames: Vec<(VertexId, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut cursor)) = frames.last_mut() {
            let out = graph.out_neighbors(v);
            if *cursor < out.len() {
                let w = out[*cursor];
                *cursor += 1;
                if visit[w.index()] == UNVISITED {
                    visit[w.index()] = clock;
                    clock += 1;
                    parent[w.index()] = Some(v);
                    children[v.index()].push(w);
                    depth[w.index()] = depth[v.index()] + 1;
                    frames.push((w, 0));
                }
            } else {
                frames.pop();
                finish[v.index()] = clock;
                clock += 1;
                if let Some(&(p, _)) = frames.last() {
                    subtree_size[p.index()] += subtree_size[v.index()];
                }
            }
        }
        if let Some(unreached) = visit.iter().position(|&t| t == UNVISITED) {
            return Err(Error::UnreachableVertex(VertexId(unreached as u32)));
        }
        Ok(DfsTree {
            root,
            parent,
            children,
            visit,
            finish,
            subtree_size,
            depth,
        })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.index()]
    }

    /// Tree children of `v`, in the order they were explored (ascending id).
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.index()]
    }

    pub fn visit_time(&self, v: VertexId) -> u32 {
        self.visit[v.index()]
    }

    pub fn finish_time(&self, v: VertexId) -> u32 {
        self.finish[v.index()]
    }

    pub fn subtree_size(&self, v: VertexId) -> u32 {
        self.subtree_size[v.index()]
    }

    /// Depth of `v`; the root has depth 0.
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v.index()]
    }

    /// True when `a` is an ancestor of `b` (reflexively: every vertex is an
    /// ancestor of itself). Answered via visit/finish interval containment.
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        self.visit[a.index()] <= self.visit[b.index()]
            && self.finish[b.index()] <= self.finish[a.index()]
    }

    /// All vertices of the subtree rooted at `a`, sorted ascending.
    pub fn subtree_vertices(&self, a: VertexId) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.subtree_size[a.index()] as usize);
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend_from_slice(&self.children[v.index()]);
        }
        out.sort_unstable();
        out
    }

    /// Rebuilds a tree from stored arrays (index deserialization). The
    /// children lists are derived from the parent array in visit order, so
    /// the result is identical to the tree that was saved.
    pub(crate) fn from_parts(
        root: VertexId,
        parent: Vec<Option<VertexId>>,
        visit: Vec<u32>,
        finish: Vec<u32>,
        subtree_size: Vec<u32>,
        depth: Vec<u32>,
    ) -> Result<Self> {
        let n = parent.len();
        if visit.len() != n || finish.len() != n || subtree_size.len() != n || depth.len() != n {
            return Err(Error::IndexFormat(
                "inconsistent tree array lengths".to_string(),
            ));
        }
        if root.index() >= n {
            return Err(Error::IndexFormat("tree root out of range".to_string()));
        }
        let mut order: Vec<VertexId> = (0..n as u32).map(VertexId).collect();
        order.sort_unstable_by_key(|v| visit[v.index()]);
        let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for &v in &order {
            if let Some(p) = parent[v.index()] {
                if p.index() >= n {
                    return Err(Error::IndexFormat("tree parent out of range".to_string()));
                }
                children[p.index()].push(v);
            }
        }
        Ok(DfsTree {
            root,
            parent,
            children,
            visit,
            finish,
            subtree_size,
            depth,
        })
    }
}

/// One heavy path: a downward chain `head..=tail` in the DFS tree where
/// each step descends into the child with the largest subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyPath {
    vertices: Vec<VertexId>,
    depth: u32,
}

impl HeavyPath {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn head(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn tail(&self) -> VertexId {
        *self.vertices.last().expect("paths are never empty")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Depth of the path's head in the DFS tree.
    pub fn depth(&self) -> u32 {
        self.depth
    }
}

/// Vertex-disjoint heavy paths covering the tree, sorted by
/// `(depth, head id)` — the order the oracle's sweep consumes them in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyPathDecomposition {
    paths: Vec<HeavyPath>,
    head_of: Vec<VertexId>,
    path_of: Vec<u32>,
}

impl HeavyPathDecomposition {
    /// Decomposes `tree` into heavy paths. From each head the path repeatedly
    /// descends into the child with maximum subtree size (ties: minimum id);
    /// every other child starts a new head.
    pub fn decompose(tree: &DfsTree) -> Self {
        let mut paths: Vec<HeavyPath> = Vec::new();
        let mut heads = vec![tree.root()];
        while let Some(head) = heads.pop() {
            let mut vertices = vec![head];
            let mut cur = head;
            while let Some(heavy) = heavy_child(tree, cur) {
                for &c in tree.children(cur) {
                    if c != heavy {
                        heads.push(c);
                    }
                }
                vertices.push(heavy);
                cur = heavy;
            }
            paths.push(HeavyPath {
                depth: tree.depth(head),
                vertices,
            });
        }
        paths.sort_by_key(|p| (p.depth, p.head()));
        Self::from_paths(tree.vertex_count(), paths)
    }

    fn from_paths(n: usize, paths: Vec<HeavyPath>) -> Self {
        let mut head_of = vec![VertexId(0); n];
        let mut path_of = vec![0u32; n];
        for (i, p) in paths.iter().enumerate() {
            for &v in &p.vertices {
                head_of[v.index()] = p.head();
                path_of[v.index()] = i as u32;
            }
        }
        HeavyPathDecomposition {
            paths,
            head_of,
            path_of,
        }
    }

    /// Rebuilds a decomposition from stored paths (index deserialization).
    pub(crate) fn from_sorted_paths(n: usize, paths: Vec<(u32, Vec<VertexId>)>) -> Result<Self> {
        let mut covered = vec![false; n];
        for (_, vertices) in &paths {
            if vertices.is_empty() {
                return Err(Error::IndexFormat("empty heavy path".to_string()));
            }
            for &v in vertices {
                if v.index() >= n || covered[v.index()] {
                    return Err(Error::IndexFormat(
                        "heavy paths do not form a disjoint cover".to_string(),
                    ));
                }
                covered[v.index()] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(Error::IndexFormat(
                "heavy paths do not cover the tree".to_string(),
            ));
        }
        let paths = paths
            .into_iter()
            .map(|(depth, vertices)| HeavyPath { depth, vertices })
            .collect();
        Ok(Self::from_paths(n, paths))
    }

    /// Paths in non-decreasing depth order (ties by head id).
    pub fn paths(&self) -> &[HeavyPath] {
        &self.paths
    }

    /// The head of the path containing `v`.
    pub fn head_of(&self, v: VertexId) -> VertexId {
        self.head_of[v.index()]
    }

    /// Index (into [`paths`]) of the path containing `v`.
    ///
    /// [`paths`]: HeavyPathDecomposition::paths
    pub fn path_of(&self, v: VertexId) -> usize {
        self.path_of[v.index()] as usize
    }

    /// How many paths start at `v` or at an ancestor of `v`. Walking the
    /// head-parent chain visits exactly the paths that contain an ancestor
    /// of `v` (or `v` itself), and each such path starts at one.
    pub fn ancestor_paths_count(&self, tree: &DfsTree, v: VertexId) -> usize {
        let mut count = 0;
        let mut cur = Some(v);
        while let Some(x) = cur {
            count += 1;
            cur = tree.parent(self.head_of(x));
        }
        count
    }

    /// Debug rendering: one line per path.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.paths {
            out.push_str(&format!(
                "depth={} head={} tail={} len={}\n",
                p.depth(),
                p.head(),
                p.tail(),
                p.len()
            ));
        }
        out
    }
}

/// The child of `v` with maximum subtree size, or `None` for leaves.
/// Children are stored in ascending id order, so keeping the first
/// maximum breaks ties toward the minimum id.
fn heavy_child(tree: &DfsTree, v: VertexId) -> Option<VertexId> {
    let mut best: Option<VertexId> = None;
    for &c in tree.children(v) {
        match best {
            None => best = Some(c),
            Some(b) if tree.subtree_size(c) > tree.subtree_size(b) => best = Some(c),
            _ => {}
        }
    }
    best
}
