use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::exit::{estimate_spa, next_estimates, spa_ratio, ComplexityParams};
use super::program::{DksGlobal, DksProgram, SearchSettings, SuperstepTrace};
use super::query::{node_keyword_masks, resolve_keyword_nodes, DEFAULT_MAX_KEYWORDS};
use super::{AnswerTree, DksError, KeywordSetMask, Query};
use crate::bsp::{run, EngineConfig, HaltReason, SuperstepReport};
use crate::graph::{Graph, InvertedIndex, NodeId, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DksConfig {
    pub search: SearchSettings,
    pub engine: EngineConfig,
    pub max_keywords: usize,
}

impl DksConfig {
    pub fn new(k: usize) -> Self {
        DksConfig {
            search: SearchSettings::new(k),
            engine: EngineConfig::default(),
            max_keywords: DEFAULT_MAX_KEYWORDS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DksHalt {
    /// Exit criterion fired, or the traversal ran dry.
    Exit,
    Budget,
    Cap,
}

impl DksHalt {
    pub fn as_str(self) -> &'static str {
        match self {
            DksHalt::Exit => "exit",
            DksHalt::Budget => "budget",
            DksHalt::Cap => "cap",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DksOutcome {
    pub query: Query,
    /// Ascending by (weight, canonical key).
    pub answers: Vec<AnswerTree>,
    pub halt: DksHalt,
    /// Superstep after which the exit criterion fired.
    pub exit_superstep: Option<usize>,
    pub supersteps: usize,
    pub spa_weight: Option<Weight>,
    /// `None` when no answer was found before an early stop.
    pub spa_ratio: Option<f64>,
    pub trace: Vec<SuperstepTrace>,
    pub reports: Vec<SuperstepReport>,
    pub vertices_computed: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub e_min: Weight,
    pub complexity: ComplexityParams,
    pub algorithm_time: Duration,
}

impl DksOutcome {
    pub fn weights(&self) -> Vec<Weight> {
        self.answers.iter().map(|a| a.weight).collect()
    }

    pub fn best(&self) -> Option<Weight> {
        self.answers.first().map(|a| a.weight)
    }

    pub fn messages_sent(&self) -> u64 {
        self.reports.iter().map(|r| r.messages_sent).sum()
    }

    pub fn deep_messages(&self) -> u64 {
        self.trace.iter().map(|t| t.counters.deep_messages).sum()
    }

    pub fn bfs_messages(&self) -> u64 {
        self.trace.iter().map(|t| t.counters.bfs_messages).sum()
    }

    /// Vertices that ever ran compute, as a percentage of |V|.
    pub fn explored_percent(&self) -> f64 {
        100.0 * self.vertices_computed as f64 / self.node_count.max(1) as f64
    }

    /// Message envelopes as a percentage of |E|.
    pub fn message_percent(&self) -> f64 {
        100.0 * self.messages_sent() as f64 / self.edge_count.max(1) as f64
    }

    pub fn to_json(&self, graph: &Graph) -> AnswerOutput {
        let answers = self
            .answers
            .iter()
            .enumerate()
            .map(|(i, a)| AnswerRecord {
                rank: i + 1,
                weight: a.weight,
                root: a.root.0,
                edges: a
                    .edges
                    .iter()
                    .map(|e| EdgeRecord {
                        src: e.lo.0,
                        dst: e.hi.0,
                        weight: e.weight,
                        label: graph
                            .edge_label(e.lo, e.hi)
                            .or_else(|| graph.edge_label(e.hi, e.lo))
                            .map(str::to_owned),
                    })
                    .collect(),
                keyword_nodes: self
                    .query
                    .keywords
                    .iter()
                    .cloned()
                    .zip(a.keyword_nodes.iter().map(|v| v.0))
                    .collect(),
            })
            .collect();
        AnswerOutput {
            query: self.query.text(),
            k: self.query.k,
            halt_reason: self.halt,
            supersteps: self.supersteps,
            answers,
            spa_weight: self.spa_weight,
            spa_ratio: self.spa_ratio,
            optimal: None,
        }
    }

    /// One record per superstep.
    pub fn metrics(&self) -> Vec<MetricsLine> {
        self.reports
            .iter()
            .zip(&self.trace)
            .map(|(r, t)| MetricsLine {
                superstep: r.index,
                active_vertices: r.active_vertices,
                messages: r.messages_sent,
                bfs_messages: t.counters.bfs_messages,
                deep_messages: t.counters.deep_messages,
                aggregator_messages: t.counters.aggregator_messages,
                s_n: t
                    .s_n
                    .iter()
                    .enumerate()
                    .filter_map(|(mask, s)| s.map(|s| (KeywordSetMask(mask as u32).to_string(), s)))
                    .collect(),
                candidates: t.candidates,
                answers: t.answers,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: u32,
    pub dst: u32,
    pub weight: Weight,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub rank: usize,
    pub weight: Weight,
    pub root: u32,
    pub edges: Vec<EdgeRecord>,
    pub keyword_nodes: BTreeMap<String, u32>,
}

/// Answer JSON for one query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnswerOutput {
    pub query: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub halt_reason: DksHalt,
    pub supersteps: usize,
    pub answers: Vec<AnswerRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spa_weight: Option<Weight>,
    pub spa_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsLine {
    pub superstep: usize,
    pub active_vertices: usize,
    pub messages: u64,
    pub bfs_messages: u64,
    pub deep_messages: u64,
    pub aggregator_messages: u64,
    pub s_n: BTreeMap<String, Weight>,
    pub candidates: Option<usize>,
    pub answers: usize,
}

/// Resolves `query` against `index` and runs the search.
pub fn run_query(
    graph: &Graph,
    index: &InvertedIndex,
    query: &Query,
    config: &DksConfig,
) -> Result<DksOutcome, DksError> {
    let groups = resolve_keyword_nodes(query, index)?;
    run_with_groups(graph, query, &groups, config)
}

/// Runs the search with explicit keyword groups T1..Tm.
pub fn run_with_groups(
    graph: &Graph,
    query: &Query,
    groups: &[Vec<NodeId>],
    config: &DksConfig,
) -> Result<DksOutcome, DksError> {
    if groups.len() != query.m() {
        return Err(DksError::GroupCount {
            groups: groups.len(),
            keywords: query.m(),
        });
    }
    if config.search.k != query.k {
        return Err(DksError::Config(format!(
            "query asks for K={} but the search is set up for K={}",
            query.k, config.search.k
        )));
    }
    check_symmetric(graph)?;
    let m = query.m();
    let masks = node_keyword_masks(groups, graph.node_count());
    let e_min = graph.min_edge_weight().unwrap_or(1);
    let program = DksProgram::new(config.search.clone(), m, masks, e_min);

    let started = Instant::now();
    let out = run(graph, &program, &config.engine, DksGlobal::new(m))?;
    let algorithm_time = started.elapsed();

    let g = out.global;
    if let Some(err) = g.errors.first() {
        return Err(DksError::Bookkeeping(err.clone()));
    }
    let halt = match out.halt {
        HaltReason::AllHalted | HaltReason::ProgramStop => DksHalt::Exit,
        HaltReason::MessageBudget => DksHalt::Budget,
        HaltReason::SuperstepCap => DksHalt::Cap,
    };
    let answers = g.topk.topk;
    let best = answers.first().map(|a| a.weight);
    let (spa_weight, ratio) = if halt == DksHalt::Exit {
        (None, Some(0.0))
    } else {
        let cover = estimate_spa(&next_estimates(&g.last_s_n, e_min), m);
        let spa = match (best, cover) {
            (Some(b), Some(c)) => Some(b.min(c)),
            (b, c) => b.or(c),
        };
        let ratio = match (best, spa) {
            (Some(b), Some(s)) => Some(spa_ratio(b, s, false)?),
            _ => None,
        };
        (spa, ratio)
    };

    let complexity = complexity(graph, &out.states, &answers, out.reports.iter().map(|r| r.messages_sent).sum(), out.vertices_computed);
    Ok(DksOutcome {
        query: query.clone(),
        answers,
        halt,
        exit_superstep: g.exit_superstep,
        supersteps: out.reports.len(),
        spa_weight,
        spa_ratio: ratio,
        trace: g.trace,
        reports: out.reports,
        vertices_computed: out.vertices_computed,
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        e_min,
        complexity,
        algorithm_time,
    })
}

/// The search treats edges as undirected, so every edge needs a reverse
/// of the same weight.
fn check_symmetric(graph: &Graph) -> Result<(), DksError> {
    for v in graph.node_ids() {
        for nb in graph.neighbors(v) {
            let back = graph.neighbors(nb.node);
            let ok = back
                .binary_search_by_key(&v, |b| b.node)
                .map(|i| back[i].weight == nb.weight)
                .unwrap_or(false);
            if !ok {
                return Err(DksError::Asymmetric { src: v, dst: nb.node });
            }
        }
    }
    Ok(())
}

fn complexity(
    graph: &Graph,
    states: &[super::program::DksVertex],
    answers: &[AnswerTree],
    messages: u64,
    computed: usize,
) -> ComplexityParams {
    let mut single = (0usize, 0usize);
    let mut sizes = (0usize, 0usize);
    for table in states.iter().filter_map(|s| s.table.as_ref()) {
        for mask in KeywordSetMask::all(table.full_mask().len()) {
            let list = table.list(mask);
            if list.is_empty() {
                continue;
            }
            if mask.len() == 1 {
                single.0 += list.len();
                single.1 += 1;
            }
            sizes.0 += mask.len() * list.len();
            sizes.1 += list.len();
        }
    }
    let mut branching = (0usize, 0usize);
    let mut height = (0usize, 0usize);
    for a in answers {
        let (b, h) = shape(a);
        branching.0 += b;
        branching.1 += 1;
        height.0 += h;
        height.1 += 1;
    }
    let ratio = |(a, b): (usize, usize)| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    ComplexityParams {
        p: ratio(single),
        r: ratio(sizes),
        c: ratio(branching),
        h: ratio(height),
        avg_degree: graph.edge_count() as f64 / graph.node_count().max(1) as f64,
        messages_per_vertex: if computed == 0 { 0.0 } else { messages as f64 / computed as f64 },
    }
}

/// Root degree and height of an answer tree.
fn shape(a: &AnswerTree) -> (usize, usize) {
    let degree = a.edges.iter().filter(|e| e.touches(a.root)).count();
    let mut height = 0;
    let mut stack = vec![(a.root, a.root, 0usize)];
    while let Some((v, parent, depth)) = stack.pop() {
        height = height.max(depth);
        for e in a.edges.iter().filter(|e| e.touches(v)) {
            let next = e.other(v);
            if next != parent {
                stack.push((next, v, depth + 1));
            }
        }
    }
    (degree, height)
}
