//! SCCs intersecting a fixed path, under edge failures.
//!
//! A [`PathStructure`] prestores an [`FtrsPair`] for every vertex of one
//! path `x_0..x_{t-1}`. A query with failure set `F` computes two marks per
//! vertex `v` of the host:
//!
//! * `max_reaching(v)` — the maximum path index `i` such that `x_i` reaches
//!   `v` in `host\F`;
//! * `min_reachable(v)` — the minimum path index `i` such that `v` reaches
//!   `x_i` in `host\F`.
//!
//! Because the path is intact in `host\F`, the per-index reachable sets are
//! nested (`x_i` reaches everything `x_{i+1}` reaches), which allows a
//! divide-and-conquer: split the index range at `mid`, compute the vertices
//! of the current bucket reachable from `x_mid`, and recurse on the two
//! halves. The restricted reachability step explores only the bucket's
//! induced subgraph of `x_mid`'s stored subgraph — every intermediate
//! vertex of a relevant walk provably lies in the bucket, and when `x_mid`
//! itself falls outside the bucket the correct answer is the empty set.
//!
//! A vertex `w` belongs to an SCC intersecting the path exactly when both
//! marks are defined and `min_reachable(w) <= max_reaching(w)` (the cycle
//! `w -> x_min.. -> x_max -> w` exists), and two such vertices share an SCC
//! exactly when their mark pairs agree — so grouping by the mark pair
//! enumerates the path-intersecting SCCs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ftrs::{ftrs_provider, FtrsPair, FtrsStrategy};
use crate::graph::{DirectedGraph, Edge, SharedGraph, VertexId};

/// Query-time options shared by the path operations.
#[derive(Debug, Clone, Copy, Default)]
pub struct PathQueryOptions {
    /// Re-derive every divide-and-conquer step from a brute-force oracle
    /// and panic on any inconsistency. Orders of magnitude slower; meant
    /// for tests and debugging sweeps.
    pub debug_checks: bool,
}

/// Both mark families for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMarks {
    /// `max_reaching[v]` = maximum path index reaching `v`, if any.
    pub max_reaching: Vec<Option<u32>>,
    /// `min_reachable[v]` = minimum path index reachable from `v`, if any.
    pub min_reachable: Vec<Option<u32>>,
}

/// Prestored per-path-vertex reachability subgraphs for one host graph.
#[derive(Debug, Clone)]
pub struct PathStructure {
    host: SharedGraph,
    path: Vec<VertexId>,
    k: u32,
    pairs: Vec<FtrsPair>,
}

impl PathStructure {
    /// Builds the structure by running the FTRS provider for every path
    /// vertex (forward and backward).
    pub fn build(
        host: SharedGraph,
        path: Vec<VertexId>,
        k: u32,
        strategy: FtrsStrategy,
    ) -> Result<Self> {
        validate_path(&host, &path)?;
        let mut by_source = ftrs_provider(strategy, &host, &path, k)?;
        let pairs = path
            .iter()
            .map(|v| {
                by_source
                    .remove(v)
                    .expect("provider returns a pair per requested source")
            })
            .collect();
        Ok(PathStructure {
            host,
            path,
            k,
            pairs,
        })
    }

    /// Reassembles a structure from prebuilt pairs (index deserialization).
    /// Validates the structural invariants: pairs align with path vertices
    /// and were built against this host (by fingerprint).
    pub fn from_parts(
        host: SharedGraph,
        path: Vec<VertexId>,
        k: u32,
        pairs: Vec<FtrsPair>,
    ) -> Result<Self> {
        validate_path(&host, &path)?;
        if pairs.len() != path.len() {
            return Err(Error::Contract(format!(
                "expected {} pairs, got {}",
                path.len(),
                pairs.len()
            )));
        }
        let host_fp = host.fingerprint();
        let reversed_fp = host.reversed().fingerprint();
        for (i, pair) in pairs.iter().enumerate() {
            if pair.source() != path[i] {
                return Err(Error::Contract(format!(
                    "pair {} built for source {}, path vertex is {}",
                    i,
                    pair.source(),
                    path[i]
                )));
            }
            if pair.fwd.k() != k {
                return Err(Error::Contract(format!(
                    "pair {} built for k={}, structure expects k={}",
                    i,
                    pair.fwd.k(),
                    k
                )));
            }
            if pair.fwd.host_fingerprint() != host_fp || pair.bwd.host_fingerprint() != reversed_fp
            {
                return Err(Error::Contract(format!(
                    "pair {} was built against a different host",
                    i
                )));
            }
        }
        Ok(PathStructure {
            host,
            path,
            k,
            pairs,
        })
    }

    pub fn host(&self) -> &DirectedGraph {
        &self.host
    }

    pub fn host_arc(&self) -> &SharedGraph {
        &self.host
    }

    pub fn path(&self) -> &[VertexId] {
        &self.path
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pairs(&self) -> &[FtrsPair] {
        &self.pairs
    }

    /// `max_reaching` marks for the whole path. The failure set must avoid
    /// the path's own edges and fit the budget `k`.
    pub fn max_reaching_marks(
        &self,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Option<u32>>> {
        let failed = self.validate_query(failed)?;
        self.forward_marks_range(0, self.path.len() - 1, &failed, opts)
    }

    /// `min_reachable` marks for the whole path; same preconditions.
    pub fn min_reachable_marks(
        &self,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Option<u32>>> {
        let failed = self.validate_query(failed)?;
        self.backward_marks_range(0, self.path.len() - 1, &failed, opts)
    }

    /// Both mark families in one call.
    pub fn marks(&self, failed: &[Edge], opts: PathQueryOptions) -> Result<PathMarks> {
        let failed = self.validate_query(failed)?;
        let hi = self.path.len() - 1;
        Ok(PathMarks {
            max_reaching: self.forward_marks_range(0, hi, &failed, opts)?,
            min_reachable: self.backward_marks_range(0, hi, &failed, opts)?,
        })
    }

    /// The SCCs of `host\F` that intersect the path, each reported once as
    /// a sorted vertex set; groups ordered by minimum member. Requires the
    /// path to be intact in `host\F`.
    pub fn sccs_on_path(
        &self,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Vec<VertexId>>> {
        let failed = self.validate_query(failed)?;
        let hi = self.path.len() - 1;
        let max_reaching = self.forward_marks_range(0, hi, &failed, opts)?;
        let min_reachable = self.backward_marks_range(0, hi, &failed, opts)?;
        Ok(group_by_marks(&max_reaching, &min_reachable))
    }

    /// Like [`sccs_on_path`], but failed edges may lie on the path: the
    /// path is split at those edges into maximal intact subpaths, each is
    /// queried with its stored pairs, and the union is deduplicated by
    /// representative vertex.
    ///
    /// [`sccs_on_path`]: PathStructure::sccs_on_path
    pub fn sccs_with_path_failures(
        &self,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Vec<VertexId>>> {
        let failed = self.dedup_budget(failed)?;
        let t = self.path.len();
        let mut segments: Vec<(usize, usize)> = Vec::new();
        let mut lo = 0;
        for pos in 0..t - 1 {
            if failed.contains(&Edge::new(self.path[pos], self.path[pos + 1])) {
                segments.push((lo, pos));
                lo = pos + 1;
            }
        }
        segments.push((lo, t - 1));

        let mut chosen: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (lo, hi) in segments {
            let max_reaching = self.forward_marks_range(lo, hi, &failed, opts)?;
            let min_reachable = self.backward_marks_range(lo, hi, &failed, opts)?;
            for group in group_by_marks(&max_reaching, &min_reachable) {
                let representative = group[0];
                // An SCC intersecting several subpaths is found once per
                // subpath; all copies must agree.
                if let Some(existing) = chosen.get(&representative) {
                    debug_assert_eq!(existing, &group, "subpaths disagree about an SCC");
                } else {
                    chosen.insert(representative, group);
                }
            }
        }
        Ok(chosen.into_values().collect())
    }

    /// Shared validation: dedup, budget check, and path-disjointness.
    fn validate_query(&self, failed: &[Edge]) -> Result<Vec<Edge>> {
        let failed = self.dedup_budget(failed)?;
        for pos in 0..self.path.len() - 1 {
            let e = Edge::new(self.path[pos], self.path[pos + 1]);
            if failed.contains(&e) {
                return Err(Error::FailedEdgeOnPath(e));
            }
        }
        Ok(failed)
    }

    fn dedup_budget(&self, failed: &[Edge]) -> Result<Vec<Edge>> {
        let mut failed = failed.to_vec();
        failed.sort_unstable();
        failed.dedup();
        if failed.len() > self.k as usize {
            return Err(Error::FailureBudgetExceeded {
                given: failed.len(),
                budget: self.k,
            });
        }
        Ok(failed)
    }

    /// `max_reaching` restricted to path indices `lo..=hi`, reported
    /// relative to `lo`. The subpath must be intact in `host\F`.
    fn forward_marks_range(
        &self,
        lo: usize,
        hi: usize,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Option<u32>>> {
        let oracle = if opts.debug_checks {
            let reach = (lo..=hi)
                .map(|i| self.host.reachable_from_avoiding(self.path[i], failed))
                .collect();
            Some(DebugOracle::new(reach))
        } else {
            None
        };
        let graph_at = |i: usize| self.pairs[lo + i].fwd.graph();
        Ok(divide_marks(
            self.host.vertex_count(),
            &self.path[lo..=hi],
            &graph_at,
            failed,
            oracle.as_ref(),
        ))
    }

    /// `min_reachable` restricted to path indices `lo..=hi`, reported
    /// relative to `lo`. Runs the same divide-and-conquer over the reversed
    /// orientation: sources in reverse path order, backward subgraphs,
    /// failures flipped — then maps the reversed indices back.
    fn backward_marks_range(
        &self,
        lo: usize,
        hi: usize,
        failed: &[Edge],
        opts: PathQueryOptions,
    ) -> Result<Vec<Option<u32>>> {
        let len = hi - lo + 1;
        let rev_sources: Vec<VertexId> = (0..len).map(|j| self.path[hi - j]).collect();
        let failed_rev: Vec<Edge> = {
            let mut f: Vec<Edge> = failed.iter().map(|e| e.reversed()).collect();
            f.sort_unstable();
            f
        };
        let oracle = if opts.debug_checks {
            let rev_host = self.host.reversed();
            let reach = rev_sources
                .iter()
                .map(|&s| rev_host.reachable_from_avoiding(s, &failed_rev))
                .collect();
            Some(DebugOracle::new(reach))
        } else {
            None
        };
        let graph_at = |j: usize| self.pairs[hi - j].bwd.graph();
        let raw = divide_marks(
            self.host.vertex_count(),
            &rev_sources,
            &graph_at,
            &failed_rev,
            oracle.as_ref(),
        );
        Ok(raw
            .into_iter()
            .map(|mark| mark.map(|j| (len - 1) as u32 - j))
            .collect())
    }
}

fn validate_path(host: &DirectedGraph, path: &[VertexId]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::InvalidPath("path is empty".to_string()));
    }
    let mut seen = vec![false; host.vertex_count()];
    for &v in path {
        if !host.contains_vertex(v) {
            return Err(Error::InvalidPath(format!(
                "vertex {} is not in the host",
                v
            )));
        }
        if seen[v.index()] {
            return Err(Error::InvalidPath(format!("vertex {} repeats", v)));
        }
        seen[v.index()] = true;
    }
    for pair in path.windows(2) {
        if !host.contains_edge(Edge::new(pair[0], pair[1])) {
            return Err(Error::InvalidPath(format!(
                "({},{}) is not a host edge",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Groups vertices whose SCC intersects the path by their `(min_reachable,
/// max_reaching)` mark pair; returns sorted groups ordered by minimum
/// member.
fn group_by_marks(
    max_reaching: &[Option<u32>],
    min_reachable: &[Option<u32>],
) -> Vec<Vec<VertexId>> {
    let mut groups: BTreeMap<(u32, u32), Vec<VertexId>> = BTreeMap::new();
    for v in 0..max_reaching.len() {
        if let (Some(max_r), Some(min_r)) = (max_reaching[v], min_reachable[v]) {
            if min_r <= max_r {
                groups
                    .entry((min_r, max_r))
                    .or_default()
                    .push(VertexId(v as u32));
            }
        }
    }
    let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
    // Entries were pushed in ascending vertex order, so each group is
    // sorted and led by its minimum member.
    out.sort_unstable_by_key(|g| g[0]);
    out
}

/// Epoch-stamped membership scratch, reset in O(|members|) per call.
struct ReachScratch {
    stamp: Vec<u64>,
    slot: Vec<u32>,
    epoch: u64,
}

impl ReachScratch {
    fn new(n: usize) -> Self {
        ReachScratch {
            stamp: vec![0; n],
            slot: vec![0; n],
            epoch: 0,
        }
    }
}

/// The members of `members` reachable from `source` inside the
/// members-induced subgraph of `graph\failed`. Returns the empty set when
/// `source` is not itself a member — in the divide-and-conquer that case
/// means no member is reachable from it at all.
fn restricted_reach(
    graph: &DirectedGraph,
    source: VertexId,
    members: &[VertexId],
    failed: &[Edge],
    scratch: &mut ReachScratch,
) -> Vec<VertexId> {
    scratch.epoch += 1;
    let epoch = scratch.epoch;
    for (slot, &v) in members.iter().enumerate() {
        scratch.stamp[v.index()] = epoch;
        scratch.slot[v.index()] = slot as u32;
    }
    if scratch.stamp[source.index()] != epoch {
        return Vec::new();
    }
    // Local adjacency of the members-induced subgraph, assembled by
    // scanning in-edges of members only.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); members.len()];
    for (slot, &v) in members.iter().enumerate() {
        for &y in graph.in_neighbors(v) {
            if scratch.stamp[y.index()] == epoch && !failed.contains(&Edge::new(y, v)) {
                adj[scratch.slot[y.index()] as usize].push(slot as u32);
            }
        }
    }
    let mut seen = vec![false; members.len()];
    let start = scratch.slot[source.index()] as usize;
    seen[start] = true;
    let mut stack = vec![start as u32];
    let mut out = vec![source];
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
                out.push(members[w as usize]);
            }
        }
    }
    out
}

/// Divide-and-conquer mark computation over `sources` (one orientation).
/// `graph_at(i)` is the stored reachability subgraph of `sources[i]`.
fn divide_marks<'g>(
    n: usize,
    sources: &[VertexId],
    graph_at: &dyn Fn(usize) -> &'g DirectedGraph,
    failed: &[Edge],
    oracle: Option<&DebugOracle>,
) -> Vec<Option<u32>> {
    let t = sources.len();
    let mut marks: Vec<Option<u32>> = vec![None; n];
    let reach_first = graph_at(0).reachable_from_avoiding(sources[0], failed);
    if t == 1 {
        for v in 0..n {
            if reach_first[v] {
                marks[v] = Some(0);
            }
        }
        return marks;
    }
    let reach_last = graph_at(t - 1).reachable_from_avoiding(sources[t - 1], failed);
    let mut pending: Vec<VertexId> = Vec::new();
    for v in 0..n {
        if reach_last[v] {
            marks[v] = Some((t - 1) as u32);
        } else if reach_first[v] {
            pending.push(VertexId(v as u32));
        }
    }
    let mut scratch = ReachScratch::new(n);
    let mut work: Vec<(u32, u32, Vec<VertexId>)> = vec![(0, (t - 2) as u32, pending)];
    while let Some((i, j, bucket)) = work.pop() {
        if bucket.is_empty() {
            continue;
        }
        if let Some(oracle) = oracle {
            oracle.check_bucket(i, j, &bucket, n);
        }
        if i == j {
            for &v in &bucket {
                marks[v.index()] = Some(i);
            }
            continue;
        }
        let mid = (i + j).div_ceil(2);
        let reached = restricted_reach(
            graph_at(mid as usize),
            sources[mid as usize],
            &bucket,
            failed,
            &mut scratch,
        );
        if let Some(oracle) = oracle {
            oracle.check_restricted_reach(i, j, mid, &bucket, &reached, n);
        }
        // bucket \ reached, via a fresh epoch marking the reached side.
        scratch.epoch += 1;
        let epoch = scratch.epoch;
        for &v in &reached {
            scratch.stamp[v.index()] = epoch;
        }
        let rest: Vec<VertexId> = bucket
            .iter()
            .copied()
            .filter(|v| scratch.stamp[v.index()] != epoch)
            .collect();
        work.push((i, mid - 1, rest));
        work.push((mid, j, reached));
    }
    marks
}

/// Brute-force reference data for one `divide_marks` run: the true
/// reachable set of every source index in `host\F`, and the marks they
/// imply. All checks panic on mismatch — they guard internal invariants.
struct DebugOracle {
    reach: Vec<Vec<bool>>,
    marks: Vec<Option<u32>>,
}

impl DebugOracle {
    fn new(reach: Vec<Vec<bool>>) -> Self {
        let n = reach.first().map_or(0, Vec::len);
        let mut marks = vec![None; n];
        for (i, mask) in reach.iter().enumerate() {
            for v in 0..n {
                if mask[v] {
                    marks[v] = Some(i as u32);
                }
            }
        }
        DebugOracle { reach, marks }
    }

    /// Every divide-and-conquer bucket must be exactly the set of vertices
    /// whose true mark lies in `[i, j]`.
    fn check_bucket(&self, i: u32, j: u32, bucket: &[VertexId], n: usize) {
        let mut in_bucket = vec![false; n];
        for &v in bucket {
            in_bucket[v.index()] = true;
        }
        // Indexing two parallel arrays; the index form is the clear one.
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            let expected = self.marks[v].is_some_and(|m| i <= m && m <= j);
            assert_eq!(
                in_bucket[v], expected,
                "bucket [{}, {}] disagrees with oracle at vertex {}",
                i, j, v
            );
        }
    }

    /// The restricted reach result must equal bucket ∩ reach(mid), and
    /// everything reachable from mid with a mark in `[i, j]` must already
    /// be in the bucket (the containment that justifies exploring the
    /// bucket-induced subgraph only).
    fn check_restricted_reach(
        &self,
        i: u32,
        j: u32,
        mid: u32,
        bucket: &[VertexId],
        reached: &[VertexId],
        n: usize,
    ) {
        let mid_reach = &self.reach[mid as usize];
        let mut in_bucket = vec![false; n];
        for &v in bucket {
            in_bucket[v.index()] = true;
        }
        let mut in_reached = vec![false; n];
        for &v in reached {
            in_reached[v.index()] = true;
        }
        for v in 0..n {
            if mid_reach[v] && self.marks[v].is_some_and(|m| i <= m && m <= j) {
                assert!(
                    in_bucket[v],
                    "vertex {} reachable from index {} escapes bucket [{}, {}]",
                    v, mid, i, j
                );
            }
            assert_eq!(
                in_reached[v],
                in_bucket[v] && mid_reach[v],
                "restricted reach from index {} wrong at vertex {}",
                mid,
                v
            );
        }
    }
}
