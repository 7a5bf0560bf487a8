use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dks::graph::{Graph, InvertedIndex};
use dks::harness::{
    self, bench, cmd_run, generate_queries, load_graph, write_csv, GraphSource, HarnessError, QueryWorkload,
    SynthParams, WorkloadSpec,
};
use dks::oracle::{enumerate_minimal_answer_trees, gst_optimal_dp, GstInstance, MAX_ENUM_NODES};
use dks::search::{resolve_keyword_nodes, DksConfig, Query};

#[derive(Parser)]
#[command(name = "dks", version, about = "Top-K keyword search over graphs on a vertex-centric engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer one query; writes answer JSON.
    Run(RunArgs),
    /// Run a query workload for several K; writes CSV.
    Bench(BenchArgs),
    /// Exact answers by enumeration (small graphs) or the optimum by DP.
    Oracle(QueryArgs),
    /// Sample a query workload from the graph's vocabulary.
    GenQueries(GenArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Node file: `id<TAB>text` per line.
    #[arg(long, requires = "graph_edges")]
    graph_nodes: Option<PathBuf>,
    /// Edge file: `src<TAB>dst[<TAB>weight]` per line.
    #[arg(long, requires = "graph_nodes")]
    graph_edges: Option<PathBuf>,
    /// N-Triples file; literals become node text
    #[arg(long, conflicts_with_all = ["graph_nodes", "fixture", "synthetic"])]
    ntriples: Option<PathBuf>,
    /// Built-in graph: path4, star3 or unbalanced.
    #[arg(long, conflicts_with_all = ["graph_nodes", "synthetic"])]
    fixture: Option<String>,
    /// Scale-free graph with this many nodes, generated from --seed.
    #[arg(long, conflicts_with = "graph_nodes")]
    synthetic: Option<usize>,
    /// In-degree at which edges are dropped by the step weights.
    #[arg(long, default_value_t = 1001)]
    tau: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource> {
        Ok(match (&self.graph_nodes, &self.graph_edges, &self.ntriples, &self.fixture, self.synthetic) {
            (Some(n), Some(e), _, _, _) => GraphSource::EdgeList {
                nodes: n.clone(),
                edges: e.clone(),
            },
            (_, _, Some(p), _, _) => GraphSource::NTriples(p.clone()),
            (_, _, _, Some(f), _) => GraphSource::Fixture(f.clone()),
            (_, _, _, _, Some(n)) => GraphSource::Synthetic(SynthParams::new(n, self.seed)),
            _ => bail!(HarnessError::Usage(
                "give a graph: --graph-nodes/--graph-edges, --ntriples, --fixture or --synthetic".into()
            )),
        })
    }

    fn load(&self) -> Result<(Graph, InvertedIndex)> {
        let g = load_graph(&self.source()?, self.tau)?;
        let idx = g.build_inverted_index();
        Ok((g, idx))
    }
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Most messages a single superstep may send.
    #[arg(long, default_value_t = 1_000_000)]
    max_messages: u64,
    #[arg(long, default_value_t = 10_000)]
    max_supersteps: usize,
}

impl EngineArgs {
    fn config(&self, k: usize) -> DksConfig {
        let mut c = DksConfig::new(k);
        c.engine.workers = self.workers;
        c.engine.message_budget = self.max_messages;
        c.engine.max_supersteps = self.max_supersteps;
        c
    }
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Space-separated keywords.
    #[arg(long)]
    query: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Add `optimal` to the answer JSON by comparing with the oracle.
    #[arg(long)]
    oracle_check: bool,
    /// Per-superstep metrics as JSON lines.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Workload file from `gen-queries`; generated from --seed when absent.
    #[arg(long)]
    workload: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
    ks: Vec<usize>,
    #[command(flatten)]
    gen: GenSpec,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenSpec {
    #[arg(long, default_value_t = 20)]
    per_count: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    min_postings: usize,
    #[arg(long)]
    max_postings: Option<usize>,
}

impl GenSpec {
    fn spec(&self, seed: u64) -> WorkloadSpec {
        let mut s = WorkloadSpec::new(self.per_count, self.counts.clone(), seed);
        s.min_postings = self.min_postings;
        s.max_postings = self.max_postings.unwrap_or(usize::MAX);
        s
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    gen: GenSpec,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(args: &RunArgs) -> Result<i32> {
    let started = Instant::now();
    let (g, idx) = args.query.graph.load()?;
    let query = Query::parse(&args.query.query, args.query.k)?;
    let config = args.engine.config(query.k);
    let out = cmd_run(&g, &idx, &query, &config, args.oracle_check, started.elapsed())?;
    let mut w = sink(&args.query.output)?;
    serde_json::to_writer_pretty(&mut w, &out.answers)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(path) = &args.metrics {
        let mut m = sink(&Some(path.clone()))?;
        for line in &out.metrics {
            serde_json::to_writer(&mut m, line)?;
            writeln!(m)?;
        }
        m.flush()?;
    }
    let r = &out.report;
    eprintln!(
        "halt={} supersteps={} explored={:.1}% messages={:.1}% of |E| deep={} algorithm={:.1}ms setup={:.1}ms",
        r.halt_reason.as_str(),
        r.supersteps,
        r.explored_pct,
        r.message_pct,
        r.deep_messages,
        r.algorithm_ms,
        r.setup_ms
    );
    Ok(out.exit_code())
}

fn bench_cmd(args: &BenchArgs) -> Result<i32> {
    let (g, idx) = args.graph.load()?;
    let workload = match &args.workload {
        Some(p) => {
            let w: QueryWorkload = fs::read_to_string(p)?.parse()?;
            w.check(&idx)?;
            w
        }
        None => generate_queries(&idx, &args.gen.spec(args.graph.seed))?,
    };
    let rows = bench(&g, &idx, &workload, &args.ks, &args.engine.config(1));
    write_csv(&rows, sink(&args.output)?)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the error column", rows.len());
    }
    Ok(harness::EXIT_OK)
}

fn oracle(args: &QueryArgs) -> Result<i32> {
    let (g, idx) = args.graph.load()?;
    let query = Query::parse(&args.query, args.k)?;
    let groups = resolve_keyword_nodes(&query, &idx)?;
    let inst = GstInstance::new(&g, groups)?;
    let mut w = sink(&args.output)?;
    if g.node_count() <= MAX_ENUM_NODES {
        let top = enumerate_minimal_answer_trees(&inst, query.k)?;
        serde_json::to_writer_pretty(&mut w, &top)?;
    } else {
        eprintln!("graph has more than {MAX_ENUM_NODES} nodes; reporting the optimum weight only");
        serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "optimum": gst_optimal_dp(&inst) }))?;
    }
    writeln!(w)?;
    w.flush()?;
    Ok(harness::EXIT_OK)
}

fn gen_queries(args: &GenArgs) -> Result<i32> {
    let (_, idx) = args.graph.load()?;
    let w = generate_queries(&idx, &args.gen.spec(args.graph.seed))?;
    let mut out = sink(&args.output)?;
    write!(out, "{w}")?;
    out.flush()?;
    Ok(harness::EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::GenQueries(a) => gen_queries(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<HarnessError>().map_or(harness::EXIT_ERROR, HarnessError::exit_code);
            let code = match e.downcast_ref::<dks::search::DksError>() {
                Some(dks::search::DksError::KeywordNotFound(_)) => harness::EXIT_KEYWORD_NOT_FOUND,
                _ => code,
            };
            ExitCode::from(code as u8)
        }
    }
}
