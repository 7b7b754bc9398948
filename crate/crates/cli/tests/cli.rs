//! End-to-end tests that drive the compiled binary the way a user would:
//! write a graph file to a temp directory, run subcommands against it, and
//! check exit codes, stdout, and stderr.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const C3: &str = "p 3 3\n0 1\n1 2\n2 0\n";

/// Two disjoint triangles; exercises the per-component stats reporting.
const TWO_TRIANGLES: &str = "p 6 6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n";

/// A path 0 -> 1 -> 2 with no cycles; every vertex is its own component.
const P3: &str = "p 3 2\n0 1\n1 2\n";

/// Diamond with a shortcut: 0 -> {1,2} -> 3 plus 0 -> 3 directly. For a
/// single failure the direct edge makes one of the two-hop routes
/// redundant, so the greedy provider can return fewer than five edges.
const BRAID: &str = "p 4 5\n0 1\n0 2\n1 3\n2 3\n0 3\n";

fn ftscc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftscc"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

/// Writes `text` under the temp dir and returns the absolute path as a
/// string, ready to splice into an argument list.
fn file_in(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).expect("file should write");
    path.to_str().expect("temp paths are UTF-8").to_string()
}

fn path_in(dir: &TempDir, name: &str) -> String {
    dir.path()
        .join(name)
        .to_str()
        .expect("temp paths are UTF-8")
        .to_string()
}

/// Builds an index for `graph_text` and returns the index path.
fn build_index(dir: &TempDir, graph_text: &str, extra: &[&str]) -> String {
    let graph = file_in(dir, "input.graph", graph_text);
    let index = path_in(dir, "input.idx");
    let mut args = vec!["build", "--graph", &graph, "-o", &index];
    args.extend_from_slice(extra);
    let out = ftscc(&args);
    assert_eq!(exit_code(&out), 0, "build failed: {}", stderr_of(&out));
    index
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

#[test]
fn build_reports_stats_and_writes_the_index() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "c3.graph", C3);
    let index = path_in(&dir, "c3.idx");
    let out = ftscc(&["build", "--graph", &graph, "-o", &index, "--k", "1"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(
        text.contains("n=3 m=3 k=1 components=1 paths=1"),
        "unexpected stats line: {text}"
    );
    assert!(text.contains("paths per component: 1"));
    assert!(
        PathBuf::from(&index).exists(),
        "index file should be written"
    );
}

#[test]
fn disjoint_components_each_report_their_path_count() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "two.graph", TWO_TRIANGLES);
    let index = path_in(&dir, "two.idx");
    let out = ftscc(&["build", "--graph", &graph, "-o", &index]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("components=2"), "stats: {text}");
    assert!(text.contains("paths per component: 1 1"), "stats: {text}");
}

#[test]
fn rebuilding_with_the_same_flags_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "c3.graph", C3);
    let first = path_in(&dir, "first.idx");
    let second = path_in(&dir, "second.idx");
    for output in [&first, &second] {
        let out = ftscc(&["build", "--graph", &graph, "-o", output, "--k", "2"]);
        assert_eq!(exit_code(&out), 0);
    }
    let a = fs::read(&first).unwrap();
    let b = fs::read(&second).unwrap();
    assert_eq!(a, b, "independent builds should serialize identically");
}

#[test]
fn missing_graph_files_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    let index = path_in(&dir, "never.idx");
    let out = ftscc(&["build", "--graph", "/nonexistent/g.graph", "-o", &index]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("error:"));
}

#[test]
fn malformed_graph_files_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "bad.graph", "p 3 1\n0 nonsense\n");
    let index = path_in(&dir, "bad.idx");
    let out = ftscc(&["build", "--graph", &graph, "-o", &index]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("parse error"),
        "stderr: {}",
        stderr_of(&out)
    );
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

#[test]
fn breaking_the_cycle_splits_every_vertex_apart() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&["query", "--index", &index, "--fail-edge", "1,2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "{\"components\":[[0],[1],[2]]}\n");
    assert!(
        stderr_of(&out).contains("query took"),
        "timing goes to stderr"
    );
}

#[test]
fn querying_with_no_failures_matches_the_static_partition() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&["query", "--index", &index]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "{\"components\":[[0,1,2]]}\n");
}

#[test]
fn over_budget_failure_sets_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &["--k", "1"]);
    let out = ftscc(&[
        "query",
        "--index",
        &index,
        "--fail-edge",
        "0,1",
        "--fail-edge",
        "1,2",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("failure budget exceeded"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_edges_are_contract_violations() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&["query", "--index", &index, "--fail-edge", "0,2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn text_format_lists_components_line_by_line() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&[
        "query",
        "--index",
        &index,
        "--fail-edge",
        "1,2",
        "--format",
        "text",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        stdout_of(&out),
        "component 0: 0\ncomponent 1: 1\ncomponent 2: 2\n"
    );
}

#[test]
fn directive_files_mix_failure_kinds() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let directives = file_in(
        &dir,
        "failures.txt",
        "# scripted sweep\nfail-edge 1,2\nfail-vertex 0\n",
    );
    let out = ftscc(&["query", "--index", &index, "--failures-file", &directives]);
    assert_eq!(exit_code(&out), 0);
    // The failed vertex is isolated, not erased: it stays as a singleton,
    // and the edge failure cuts 1 and 2 apart.
    assert_eq!(stdout_of(&out), "{\"components\":[[0],[1],[2]]}\n");
}

#[test]
fn insert_directives_are_rejected_outside_update() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let directives = file_in(&dir, "failures.txt", "insert-edge 0,2\n");
    let out = ftscc(&["query", "--index", &index, "--failures-file", &directives]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("only valid for `update`"));
}

#[test]
fn unknown_flags_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&["query", "--index", &index, "--no-such-flag"]);
    assert_eq!(exit_code(&out), 1);
}

// ---------------------------------------------------------------------------
// update
// ---------------------------------------------------------------------------

#[test]
fn reinserting_a_deleted_edge_restores_the_cycle() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &["--with-updates"]);
    let out = ftscc(&[
        "update",
        "--index",
        &index,
        "--fail-edge",
        "1,2",
        "--insert-edge",
        "1,2",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "{\"components\":[[0,1,2]]}\n");
}

#[test]
fn inserting_a_chord_merges_path_vertices() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, P3, &["--with-updates"]);
    let out = ftscc(&["update", "--index", &index, "--insert-edge", "2,0"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "{\"components\":[[0,1,2]]}\n");
}

#[test]
fn updates_against_a_static_index_are_contract_violations() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let out = ftscc(&["update", "--index", &index, "--insert-edge", "0,2"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("update support"));
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[test]
fn verify_passes_on_a_freshly_built_index() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "c3.graph", C3);
    let out = ftscc(&["verify", "--graph", &graph, "--trials", "40", "--seed", "3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "trials: 40 passed, 0 failed\n");
}

#[test]
fn verify_with_zero_trials_warns_and_passes() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "c3.graph", C3);
    let out = ftscc(&["verify", "--graph", &graph, "--trials", "0"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stderr_of(&out).contains("warning"));
    assert_eq!(stdout_of(&out), "trials: 0 passed, 0 failed\n");
}

#[test]
fn verify_catches_an_index_built_for_a_different_graph() {
    // The sabotage fixture: an index honestly built for the acyclic path
    // graph, then verified against the triangle. The very first trial (the
    // empty failure set) already disagrees, so the differential report must
    // flag it and exit nonzero.
    let dir = TempDir::new().unwrap();
    let wrong_index = build_index(&dir, P3, &[]);
    let graph = file_in(&dir, "c3.graph", C3);
    let out = ftscc(&[
        "verify",
        "--graph",
        &graph,
        "--index",
        &wrong_index,
        "--trials",
        "10",
    ]);
    assert_eq!(exit_code(&out), 2);
    let text = stdout_of(&out);
    assert!(text.contains("failed"), "report: {text}");
    assert!(text.contains("first counterexample"), "report: {text}");
}

#[test]
fn verify_exhaustive_sweeps_generated_graphs() {
    let out = ftscc(&["verify", "--exhaustive", "--seed", "11"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains(" passed, 0 failed"), "report: {text}");
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[test]
fn bench_emits_csv_on_stdout_and_summaries_on_stderr() {
    let out = ftscc(&[
        "bench",
        "--sizes",
        "60,120",
        "--queries",
        "5",
        "--seed",
        "7",
    ]);
    assert_eq!(exit_code(&out), 0);
    let csv = stdout_of(&out);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,m,k,build_ms,mean_query_ms,p99_query_ms")
    );
    // Two size rows plus the k = 1..3 sweep at the smallest size.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5, "csv rows: {rows:?}");
    for row in &rows {
        assert_eq!(row.split(',').count(), 6, "malformed row: {row}");
    }
    let report = stderr_of(&out);
    assert!(report.contains("mean query ratio"), "stderr: {report}");
    assert!(report.contains("build time k sweep"), "stderr: {report}");
    assert!(report.contains("trivial provider"), "stderr: {report}");
}

#[test]
fn bench_rows_are_deterministic_apart_from_timings() {
    let args = ["bench", "--sizes", "50", "--queries", "3", "--seed", "9"];
    let shape = |out: &Output| -> Vec<(String, String, String)> {
        stdout_of(out)
            .lines()
            .skip(1)
            .map(|row| {
                let cols: Vec<&str> = row.split(',').collect();
                (
                    cols[0].to_string(),
                    cols[1].to_string(),
                    cols[2].to_string(),
                )
            })
            .collect()
    };
    let first = ftscc(&args);
    let second = ftscc(&args);
    assert_eq!(shape(&first), shape(&second), "n,m,k columns should repeat");
}

// ---------------------------------------------------------------------------
// ftrs-check
// ---------------------------------------------------------------------------

#[test]
fn ftrs_check_accepts_both_providers_on_the_braid() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "braid.graph", BRAID);
    let trivial = ftscc(&[
        "ftrs-check",
        "--graph",
        &graph,
        "--source",
        "0",
        "--k",
        "1",
        "--strategy",
        "trivial",
    ]);
    assert_eq!(exit_code(&trivial), 0);
    let greedy = ftscc(&[
        "ftrs-check",
        "--graph",
        &graph,
        "--source",
        "0",
        "--k",
        "1",
        "--strategy",
        "greedy",
    ]);
    assert_eq!(exit_code(&greedy), 0);

    let parse = |out: &Output| -> serde_json::Value {
        serde_json::from_str(&stdout_of(out)).expect("report should be JSON")
    };
    let t = parse(&trivial);
    let g = parse(&greedy);
    assert_eq!(t["valid"], true);
    assert_eq!(g["valid"], true);
    assert_eq!(t["edge_count"], 5, "trivial keeps the whole host");
    let kept = g["edge_count"].as_u64().expect("edge_count is a number");
    assert!(
        kept < 5,
        "greedy should drop a redundant route, kept {kept}"
    );
}

#[test]
fn ftrs_check_rejects_unknown_sources() {
    let dir = TempDir::new().unwrap();
    let graph = file_in(&dir, "braid.graph", BRAID);
    let out = ftscc(&["ftrs-check", "--graph", &graph, "--source", "9"]);
    assert_eq!(exit_code(&out), 2);
}

// ---------------------------------------------------------------------------
// top-level plumbing
// ---------------------------------------------------------------------------

#[test]
fn help_and_version_exit_cleanly() {
    for flag in ["--help", "--version"] {
        let out = ftscc(&[flag]);
        assert_eq!(exit_code(&out), 0, "{flag} should succeed");
    }
    let help = ftscc(&["--help"]);
    let text = stdout_of(&help);
    for command in ["build", "query", "update", "verify", "bench", "ftrs-check"] {
        assert!(text.contains(command), "help should list {command}");
    }
}

#[test]
fn corrupted_index_files_fail_to_load() {
    let dir = TempDir::new().unwrap();
    let index = build_index(&dir, C3, &[]);
    let mut bytes = fs::read(&index).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    let mangled = dir.path().join("mangled.idx");
    fs::write(&mangled, &bytes).unwrap();
    let out = ftscc(&[
        "query",
        "--index",
        mangled.to_str().unwrap(),
        "--fail-edge",
        "1,2",
    ]);
    assert_eq!(exit_code(&out), 1, "stderr: {}", stderr_of(&out));
}
