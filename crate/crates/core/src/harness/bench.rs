//! Workload benchmarks and their CSV form.

use std::io::Write;

use super::{flood, ms, FloodReport, HarnessError, QueryWorkload, RunReport};
use crate::bsp::EngineConfig;
use crate::graph::{Graph, InvertedIndex, NodeId};
use crate::search::{run_query, DksConfig, DksHalt, Query};

/// Column order of the bench CSV. Plot scripts depend on it; append only.
pub const CSV_COLUMNS: [&str; 25] = [
    "algorithm",
    "query",
    "m",
    "k",
    "halt_reason",
    "supersteps",
    "setup_ms",
    "algorithm_ms",
    "explored_pct",
    "message_pct",
    "messages",
    "bfs_messages",
    "deep_messages",
    "answers",
    "best_weight",
    "spa_weight",
    "spa_ratio",
    "share_send_bfs",
    "share_receive",
    "share_send_deep",
    "share_send_agg",
    "share_evaluate",
    "nodes",
    "edges",
    "error",
];

/// One CSV row: a DKS run, a failed DKS run, or the BFS baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub algorithm: &'static str,
    pub m: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Absent for the baseline and for failed runs.
    pub report: Option<RunReport>,
    pub query: String,
    pub k: usize,
    pub error: Option<String>,
    /// Baseline only.
    pub flood: Option<FloodReport>,
}

impl BenchRow {
    fn record(&self) -> Vec<String> {
        let opt = |x: Option<String>| x.unwrap_or_default();
        let f = |x: f64| format!("{x:.3}");
        let mut rec = vec![self.algorithm.to_string(), self.query.clone(), self.m.to_string(), self.k.to_string()];
        match (&self.report, &self.flood) {
            (Some(r), _) => rec.extend([
                r.halt_reason.as_str().to_string(),
                r.supersteps.to_string(),
                f(r.setup_ms),
                f(r.algorithm_ms),
                f(r.explored_pct),
                f(r.message_pct),
                r.messages.to_string(),
                r.bfs_messages.to_string(),
                r.deep_messages.to_string(),
                r.answers.to_string(),
                opt(r.best_weight.map(|w| w.to_string())),
                opt(r.spa_weight.map(|w| w.to_string())),
                opt(r.spa_ratio.map(|x| format!("{x:.4}"))),
                f(r.share_send_bfs),
                f(r.share_receive),
                f(r.share_send_deep),
                f(r.share_send_agg),
                f(r.share_evaluate),
            ]),
            (None, Some(fl)) => {
                let mut cols = vec![String::new(); 18];
                cols[1] = fl.supersteps.to_string();
                cols[3] = f(ms(fl.elapsed));
                cols[4] = f(100.0 * fl.reached as f64 / self.nodes.max(1) as f64);
                cols[5] = f(100.0 * fl.messages as f64 / self.edges.max(1) as f64);
                cols[6] = fl.messages.to_string();
                cols[7] = fl.messages.to_string();
                rec.extend(cols);
            }
            (None, None) => rec.extend(vec![String::new(); 18]),
        }
        rec.extend([self.nodes.to_string(), self.edges.to_string(), opt(self.error.clone())]);
        rec
    }

    pub fn is_dks(&self) -> bool {
        self.algorithm == "dks"
    }

    pub fn halted_by_exit(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.halt_reason == DksHalt::Exit)
    }
}

/// One row per (query, K), queries outermost, then one BFS baseline row
/// flooding from node 0. A failing query is recorded in its row and the
/// run moves on.
pub fn bench(
    graph: &Graph,
    index: &InvertedIndex,
    workload: &QueryWorkload,
    ks: &[usize],
    template: &DksConfig,
) -> Vec<BenchRow> {
    let mut rows = Vec::with_capacity(workload.len() * ks.len() + 1);
    for keywords in &workload.queries {
        for &k in ks {
            let mut row = BenchRow {
                algorithm: "dks",
                m: keywords.len(),
                nodes: graph.node_count(),
                edges: graph.edge_count(),
                report: None,
                query: keywords.join(" "),
                k,
                error: None,
                flood: None,
            };
            let mut config = template.clone();
            config.search.k = k;
            let result = Query::new(keywords.clone(), k, config.max_keywords)
                .and_then(|q| run_query(graph, index, &q, &config));
            match result {
                Ok(out) => row.report = Some(RunReport::new(&out, Default::default())),
                Err(e) => row.error = Some(e.to_string()),
            }
            rows.push(row);
        }
    }
    rows.push(baseline_row(graph, &template.engine));
    rows
}

fn baseline_row(graph: &Graph, engine: &EngineConfig) -> BenchRow {
    let mut row = BenchRow {
        algorithm: "bfs",
        m: 0,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        report: None,
        query: String::new(),
        k: 0,
        error: None,
        flood: None,
    };
    if graph.node_count() == 0 {
        row.error = Some("empty graph".into());
        return row;
    }
    match flood(graph, &[NodeId(0)], engine) {
        Ok(r) => row.flood = Some(r),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}
