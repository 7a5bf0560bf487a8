//! Plumbing behind the `dks` binary: loading graphs, running queries,
//! checking against the oracle, benchmarking workloads.

mod baseline;
mod bench;
pub mod synth;
mod workload;

use std::fs::File;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bsp::EngineError;
use crate::graph::{read_edge_list, read_ntriples, Graph, GraphError, InvertedIndex, WeightMode, WeightPolicy};
use crate::oracle::{enumerate_minimal_answer_trees, gst_optimal_dp, GstInstance, OracleError, MAX_ENUM_NODES};
use crate::search::{
    resolve_keyword_nodes, run_with_groups, AnswerOutput, DksConfig, DksError, DksHalt, DksOutcome, MetricsLine,
    PhaseTimes, Query,
};

pub use baseline::{flood, FloodProgram, FloodReport};
pub use bench::{bench, write_csv, BenchRow, CSV_COLUMNS};
pub use synth::{scale_free, SynthParams};
pub use workload::{generate_queries, QueryWorkload, WorkloadSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_KEYWORD_NOT_FOUND: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_SUPERSTEP_CAP: i32 = 5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] DksError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("workload needs {needed} distinct keywords but only {available} tokens qualify")]
    Vocabulary { needed: usize, available: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Search(DksError::KeywordNotFound(_)) => EXIT_KEYWORD_NOT_FOUND,
            HarnessError::Usage(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        }
    }
}

/// Where a graph comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    EdgeList { nodes: PathBuf, edges: PathBuf },
    NTriples(PathBuf),
    Fixture(String),
    Synthetic(SynthParams),
}

/// Loads a graph ready for search: weighted and with reverse edges.
/// Edge lists keep their weights when every edge has one; N-Triples and
/// synthetic graphs always get step weights.
pub fn load_graph(source: &GraphSource, tau: usize) -> Result<Graph, HarnessError> {
    let step = WeightPolicy {
        tau,
        mode: WeightMode::DegreeStep,
    };
    let keep = WeightPolicy {
        tau,
        mode: WeightMode::Precomputed,
    };
    let g = match source {
        GraphSource::EdgeList { nodes, edges } => {
            let g = read_edge_list(nodes, edges)?;
            let weighted = g.edges().iter().all(|e| e.weight.is_some());
            g.prepare(if weighted { &keep } else { &step })?
        }
        GraphSource::NTriples(path) => read_ntriples(File::open(path)?)?.prepare(&step)?,
        GraphSource::Fixture(name) => crate::fixtures::by_name(name).ok_or_else(|| {
            HarnessError::Usage(format!(
                "unknown fixture {name}; expected one of {}",
                crate::fixtures::NAMES.join(", ")
            ))
        })?,
        GraphSource::Synthetic(p) => scale_free(p).prepare(&step)?,
    };
    Ok(g)
}

/// Per-query metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub query: String,
    pub k: usize,
    pub halt_reason: DksHalt,
    pub supersteps: usize,
    /// Loading, indexing and serialization; excluded from `algorithm_ms`.
    pub setup_ms: f64,
    pub algorithm_ms: f64,
    /// Vertices that ever ran compute / |V|.
    pub explored_pct: f64,
    /// Message envelopes / |E|. Can exceed 100.
    pub message_pct: f64,
    pub messages: u64,
    pub bfs_messages: u64,
    pub deep_messages: u64,
    pub answers: usize,
    pub best_weight: Option<u64>,
    pub spa_weight: Option<u64>,
    pub spa_ratio: Option<f64>,
    pub share_send_bfs: f64,
    pub share_receive: f64,
    pub share_send_deep: f64,
    pub share_send_agg: f64,
    pub share_evaluate: f64,
}

impl RunReport {
    pub fn new(out: &DksOutcome, setup: Duration) -> Self {
        let phases = out.trace.iter().fold(PhaseTimes::default(), |acc, t| acc.add(t.phases));
        let total = phases.total();
        let share = |x: u64| if total == 0 { 0.0 } else { 100.0 * x as f64 / total as f64 };
        RunReport {
            query: out.query.text(),
            k: out.query.k,
            halt_reason: out.halt,
            supersteps: out.supersteps,
            setup_ms: ms(setup),
            algorithm_ms: ms(out.algorithm_time),
            explored_pct: out.explored_percent(),
            message_pct: out.message_percent(),
            messages: out.messages_sent(),
            bfs_messages: out.bfs_messages(),
            deep_messages: out.deep_messages(),
            answers: out.answers.len(),
            best_weight: out.best(),
            spa_weight: out.spa_weight,
            spa_ratio: out.spa_ratio,
            share_send_bfs: share(phases.send_bfs),
            share_receive: share(phases.receive),
            share_send_deep: share(phases.send_deep),
            share_send_agg: share(phases.send_agg),
            share_evaluate: share(phases.evaluate),
        }
    }

    pub fn phase_share_total(&self) -> f64 {
        self.share_send_bfs + self.share_receive + self.share_send_deep + self.share_send_agg + self.share_evaluate
    }
}

pub(crate) fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Everything `dks run` produces for one query.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub outcome: DksOutcome,
    pub answers: AnswerOutput,
    pub metrics: Vec<MetricsLine>,
    pub report: RunReport,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        match self.outcome.halt {
            DksHalt::Exit => EXIT_OK,
            DksHalt::Budget => EXIT_BUDGET,
            DksHalt::Cap => EXIT_SUPERSTEP_CAP,
        }
    }
}

/// Index lookup, search, JSON. With `oracle_check` the answer JSON gains
/// `optimal`.
pub fn cmd_run(
    graph: &Graph,
    index: &InvertedIndex,
    query: &Query,
    config: &DksConfig,
    oracle_check: bool,
    setup: Duration,
) -> Result<RunOutput, HarnessError> {
    let groups = resolve_keyword_nodes(query, index)?;
    let outcome = run_with_groups(graph, query, &groups, config)?;
    let started = Instant::now();
    let mut answers = outcome.to_json(graph);
    if oracle_check {
        answers.optimal = Some(oracle_agrees(graph, &groups, &outcome)?);
    }
    let metrics = outcome.metrics();
    let report = RunReport::new(&outcome, setup + started.elapsed());
    Ok(RunOutput {
        outcome,
        answers,
        metrics,
        report,
    })
}

/// On graphs small enough to enumerate, the whole top-K weight list must
/// match; otherwise only the best weight is compared with the exact optimum.
pub fn oracle_agrees(graph: &Graph, groups: &[Vec<crate::graph::NodeId>], out: &DksOutcome) -> Result<bool, HarnessError> {
    let inst = GstInstance::new(graph, groups.to_vec())?;
    if graph.node_count() <= MAX_ENUM_NODES {
        let want = enumerate_minimal_answer_trees(&inst, out.query.k)?;
        Ok(want.weights() == out.weights())
    } else {
        Ok(gst_optimal_dp(&inst) == out.best())
    }
}
