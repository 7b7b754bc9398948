//! Integration tests for failure-plus-insertion queries: randomized
//! oracle equivalence, the per-source equality between auxiliary-graph
//! components and the fully updated split graph's components, coarsening
//! monotonicity, and the auxiliary edge bound.

mod common;

use std::sync::Arc;

use common::*;
use ftscc_core::{
    auxiliary_graph, query_with_updates, DirectedGraph, Edge, FailureSet, FtSccIndex, FtrsStrategy,
    SharedGraph, UpdateSet, VertexId,
};

fn update_index(g: &SharedGraph, k: u32) -> FtSccIndex {
    FtSccIndex::preprocess(Arc::clone(g), k, FtrsStrategy::Trivial, true)
        .expect("k >= 1 and the graph is well-formed")
}

fn random_insertions(r: &mut rand::rngs::StdRng, n: usize, count: usize) -> Vec<Edge> {
    let mut out = Vec::new();
    for _ in 0..count {
        let u = r.random_range(0..n as u32);
        let v = r.random_range(0..n as u32);
        if u != v {
            out.push(Edge::of(u, v));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[test]
fn randomized_update_batches_match_oracle() {
    for seed in 0..200 {
        let mut r = rng(seed);
        let n = r.random_range(2..=30usize);
        let g = Arc::new(if seed % 3 == 0 {
            random_digraph(&mut r, n, 3 * n)
        } else {
            random_strongly_connected(&mut r, n, n)
        });
        let ix = update_index(&g, 3);
        let x_count = r.random_range(0..=3usize);
        let y_count = r.random_range(0..=3usize);
        let deletions = random_failures(&mut r, &g, x_count, 0.3);
        let insertions = random_insertions(&mut r, n, y_count);
        let u = UpdateSet::new(deletions.clone(), insertions.clone());
        let got = query_with_updates(&ix, &u).unwrap();
        let want = oracle_updated_partition(&g, &deletions, &insertions);
        assert_eq!(
            got.components(),
            &want[..],
            "seed {seed}: X = ({:?}, {:?}), Y = {insertions:?}",
            deletions.edges(),
            deletions.vertices()
        );
    }
}

/// For every merge source, its component in the auxiliary graph equals
/// its component in the fully updated split graph — the equality that
/// justifies merging along auxiliary SCCs.
#[test]
fn auxiliary_components_equal_updated_split_components() {
    for seed in 0..150 {
        let mut r = rng(seed);
        let n = r.random_range(2..=25usize);
        let g = Arc::new(random_strongly_connected(&mut r, n, n));
        let ix = update_index(&g, 3);
        let x_count = r.random_range(0..=3usize);
        let y_count = r.random_range(1..=3usize);
        let deletions = random_failures(&mut r, &g, x_count, 0.3);
        let insertions = random_insertions(&mut r, n, y_count);
        let u = UpdateSet::new(deletions.clone(), insertions.clone());
        let aux = auxiliary_graph(&ix, &u).unwrap();
        assert!(
            aux.graph.edge_count() <= aux.edge_bound,
            "seed {seed}: auxiliary graph exceeds its edge bound"
        );
        let aux_sccs = aux.graph.tarjan_scc();
        let updated = updated_split_graph(&g, &deletions, &insertions);
        let full_sccs = updated.tarjan_scc();
        for &s in &aux.sources {
            let a: &[VertexId] = &aux_sccs.components()[aux_sccs.component_of(s)];
            let b: &[VertexId] = &full_sccs.components()[full_sccs.component_of(s)];
            assert_eq!(
                a, b,
                "seed {seed}: source {s:?} has different components in the \
                 auxiliary and fully updated split graphs"
            );
        }
    }
}

/// Insertions only ever merge components of the post-deletion partition.
#[test]
fn insertions_only_coarsen_the_deletion_partition() {
    for seed in 0..100 {
        let mut r = rng(seed);
        let n = r.random_range(2..=20usize);
        let g = Arc::new(random_digraph(&mut r, n, 2 * n));
        let ix = update_index(&g, 3);
        let deletions = random_failures(&mut r, &g, 2, 0.3);
        let insertions = random_insertions(&mut r, n, 3);
        let base = ix.query(&deletions).unwrap();
        let updated =
            query_with_updates(&ix, &UpdateSet::new(deletions.clone(), insertions)).unwrap();
        assert!(
            base.is_refinement_of(&updated),
            "seed {seed}: an insertion split a component"
        );
    }
}

/// A batch whose insertions all already exist changes nothing beyond the
/// deletions themselves.
#[test]
fn reinserting_existing_edges_is_idempotent() {
    for seed in 0..50 {
        let mut r = rng(seed);
        let n = r.random_range(2..=15usize);
        let g = Arc::new(random_strongly_connected(&mut r, n, n));
        let ix = update_index(&g, 2);
        let deletions = random_failures(&mut r, &g, 1, 0.0);
        let kept: Vec<Edge> = (0..2)
            .map(|_| g.edges()[r.random_range(0..g.edge_count())])
            .filter(|e| !deletions.edges().contains(e))
            .collect();
        let with = query_with_updates(&ix, &UpdateSet::new(deletions.clone(), kept)).unwrap();
        let without = ix.query(&deletions).unwrap();
        assert_eq!(
            with.components(),
            without.components(),
            "seed {seed}: re-inserting surviving edges changed the answer"
        );
    }
}

/// Deleting an edge and re-inserting it in the same batch restores it.
#[test]
fn delete_then_reinsert_restores_the_edge() {
    let g = Arc::new(DirectedGraph::parse("p 3 3\n0 1\n1 2\n2 0\n").unwrap());
    let ix = update_index(&g, 2);
    let deletions = FailureSet::from_edges([Edge::of(1, 2)]);
    let u = UpdateSet::new(deletions, vec![Edge::of(1, 2)]);
    let got = query_with_updates(&ix, &u).unwrap();
    assert_eq!(
        got.components(),
        &[vec![VertexId(0), VertexId(1), VertexId(2)]]
    );
}

#[test]
fn update_validation_rejects_bad_batches() {
    let g = Arc::new(DirectedGraph::parse("p 3 3\n0 1\n1 2\n2 0\n").unwrap());
    let ix = update_index(&g, 1);
    // Too many insertions for the budget.
    let too_many = UpdateSet::new(FailureSet::new(), vec![Edge::of(0, 2), Edge::of(2, 1)]);
    assert!(query_with_updates(&ix, &too_many).is_err());
    // Unknown insertion endpoint.
    let bad_endpoint = UpdateSet::new(FailureSet::new(), vec![Edge::of(0, 7)]);
    assert!(query_with_updates(&ix, &bad_endpoint).is_err());
    // Deleting an edge the graph does not have.
    let bad_deletion = UpdateSet::new(FailureSet::from_edges([Edge::of(0, 2)]), Vec::new());
    assert!(query_with_updates(&ix, &bad_deletion).is_err());
    // An index built without update support refuses batches outright.
    let plain = FtSccIndex::preprocess(Arc::clone(&g), 1, FtrsStrategy::Trivial, false).unwrap();
    let empty = UpdateSet::new(FailureSet::new(), Vec::new());
    assert!(query_with_updates(&plain, &empty).is_err());
}
