//! `ftscc` — build, query, update, verify, and benchmark fault-tolerant
//! strongly-connected-component indexes from the command line.
//!
//! Exit codes: 0 on success (and on an all-pass verify), 1 on parse or
//! I/O errors, 2 on contract violations — exceeded failure budgets,
//! unknown edges or vertices, and failed verification runs.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod failures;

#[derive(Parser)]
#[command(
    name = "ftscc",
    version,
    about = "Fault-tolerant strongly connected components oracle",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a graph file into an index file.
    Build(BuildArgs),
    /// Report the SCCs of graph-minus-failures from a saved index.
    Query(QueryArgs),
    /// Report the SCCs after edge/vertex deletions plus edge insertions.
    Update(UpdateArgs),
    /// Differential-test index answers against static recomputation.
    Verify(VerifyArgs),
    /// Benchmark build and query times on generated graphs (CSV).
    Bench(BenchArgs),
    /// Build one fault-tolerant reachability subgraph and check it
    /// against the definition exhaustively.
    FtrsCheck(FtrsCheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    /// Store the host graph itself (shared, no extra memory per vertex).
    Trivial,
    /// Greedily drop edges while the exhaustive definition check passes.
    Greedy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct BuildArgs {
    /// Graph file ("p n m" header, one "u v" edge per line).
    #[arg(long)]
    graph: std::path::PathBuf,
    /// Where to write the index.
    #[arg(long, short)]
    output: std::path::PathBuf,
    /// Failure budget: queries may remove up to k edges plus vertices.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Strategy::Trivial)]
    strategy: Strategy,
    /// Work budget for the greedy strategy's exhaustive re-checks.
    #[arg(long, default_value_t = 200_000_000)]
    greedy_budget: u64,
    /// Also store per-vertex subgraphs so `update` queries work.
    #[arg(long)]
    with_updates: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// Index file written by `build`.
    #[arg(long)]
    index: std::path::PathBuf,
    /// Failed edge "u,v"; repeatable.
    #[arg(long = "fail-edge", value_name = "U,V")]
    fail_edges: Vec<String>,
    /// Failed vertex id; repeatable.
    #[arg(long = "fail-vertex", value_name = "V")]
    fail_vertices: Vec<u32>,
    /// File of directives, one per line: `fail-edge u,v` / `fail-vertex v`.
    #[arg(long = "failures-file")]
    failures_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct UpdateArgs {
    /// Index file written by `build --with-updates`.
    #[arg(long)]
    index: std::path::PathBuf,
    #[arg(long = "fail-edge", value_name = "U,V")]
    fail_edges: Vec<String>,
    #[arg(long = "fail-vertex", value_name = "V")]
    fail_vertices: Vec<u32>,
    /// Inserted edge "u,v" between existing vertices; repeatable.
    #[arg(long = "insert-edge", value_name = "U,V")]
    insert_edges: Vec<String>,
    /// Directive file; additionally accepts `insert-edge u,v` lines.
    #[arg(long = "failures-file")]
    failures_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph file to test on (required unless --exhaustive).
    #[arg(long, required_unless_present = "exhaustive")]
    graph: Option<std::path::PathBuf>,
    /// Test this saved index instead of a fresh build.
    #[arg(long)]
    index: Option<std::path::PathBuf>,
    /// Number of randomized failure-set trials.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Strategy::Trivial)]
    strategy: Strategy,
    #[arg(long, default_value_t = 200_000_000)]
    greedy_budget: u64,
    /// Instead of randomized trials: sweep every single-edge and
    /// single-vertex failure on ten generated graphs (n = 15, m ≈ 3n).
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1000usize, 2000, 4000])]
    sizes: Vec<usize>,
    /// Edges per vertex in the generated graphs.
    #[arg(long, default_value_t = 10)]
    edge_factor: usize,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Random failure-set queries measured per row.
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also sweep k = 1..=3 at the smallest size and report whether
    /// build time grows monotonically.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    k_sweep: bool,
}

#[derive(Args)]
struct FtrsCheckArgs {
    #[arg(long)]
    graph: std::path::PathBuf,
    /// Source vertex of the reachability subgraph.
    #[arg(long)]
    source: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
    strategy: Strategy,
    /// Work budget for the exhaustive checks.
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Query(a) => commands::query(a),
        Command::Update(a) => commands::update(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(a) => commands::bench(a),
        Command::FtrsCheck(a) => commands::ftrs_check(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_contract_violation() {
                2
            } else {
                1
            }
        }
    }
}
