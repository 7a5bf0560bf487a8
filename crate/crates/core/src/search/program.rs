use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::aggregate::{AAState, ASState, Counters, DksAggregator, DksContribution, PhaseTimes, VertexSample};
use super::exit::{candidate_nodes, check_exit};
use super::{answer_weight_eq3, AnswerTree, KeywordSetMask, PartialAnswer, SkVkTable};
use crate::bsp::{Context, MasterAction, VertexProgram};
use crate::graph::{NodeId, Weight};

/// Switches for the parts of the search that tests turn off one at a time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub k: usize,
    /// Cap every per-mask list at K (local-tree filtering).
    pub filter: bool,
    pub deep_messages: bool,
    pub exit_criterion: bool,
    /// Drop partial answers no lighter than the current K-th answer.
    pub threshold_pruning: bool,
    /// Longest chain of deep-message relays.
    pub max_deep_hops: u32,
    /// Keep per-vertex minima so the master can count candidates.
    pub record_samples: bool,
    /// A_S takes minima from frontier vertices only instead of from every
    /// new entry.
    pub frontier_minima: bool,
}

impl SearchSettings {
    pub fn new(k: usize) -> Self {
        SearchSettings {
            k,
            filter: true,
            deep_messages: true,
            exit_criterion: true,
            threshold_pruning: true,
            max_deep_hops: 10_000,
            record_samples: true,
            frontier_minima: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsMessage {
    pub sender: NodeId,
    pub edge_weight: Weight,
    /// New entries of the sender's filtered table, rooted at the sender.
    pub table: Vec<Arc<PartialAnswer>>,
}

/// Entries sent back across an edge the receiver used earlier, so that
/// roots inside explored branches learn about keywords on the far side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeepMessage {
    /// Vertex whose table produced `carried`. Relays re-emit under their own id.
    pub origin: NodeId,
    pub sender: NodeId,
    pub edge_weight: Weight,
    /// Relays since `origin`, starting at 1.
    pub hops: u32,
    pub carried: Vec<Arc<PartialAnswer>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DksMessage {
    Bfs(BfsMessage),
    Deep(DeepMessage),
}

impl DksMessage {
    fn order_key(&self) -> (NodeId, u8) {
        match self {
            DksMessage::Bfs(m) => (m.sender, 0),
            DksMessage::Deep(m) => (m.sender, 1),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DksVertex {
    /// Allocated on first use.
    pub table: Option<SkVkTable>,
    /// Neighbours that have sent this vertex anything, ascending.
    pub senders: Vec<NodeId>,
    pub reached: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperstepTrace {
    pub superstep: usize,
    /// A_S minima, indexed by mask.
    pub s_n: Vec<Option<Weight>>,
    /// Largest constituent path-lengths of the top-K, indexed by mask.
    pub l_n: Vec<Option<Weight>>,
    pub answers: usize,
    pub kth_weight: Option<Weight>,
    /// Counted once K answers exist.
    pub candidates: Option<usize>,
    /// Candidates that are neither frontier vertices nor deep receivers.
    pub stray_candidates: usize,
    pub exit_fired: bool,
    pub counters: Counters,
    #[serde(skip)]
    pub phases: PhaseTimes,
}

/// Master-side state, read by every vertex.
#[derive(Clone, Debug, Default)]
pub struct DksGlobal {
    pub topk: AAState,
    pub l_n: Vec<Option<Weight>>,
    /// Entries at or above this length are dropped.
    pub threshold: Weight,
    /// Set once the exit criterion fires; BFS sends stop from then on.
    pub stop: bool,
    pub exit_superstep: Option<usize>,
    pub last_s_n: Vec<Option<Weight>>,
    pub trace: Vec<SuperstepTrace>,
    pub errors: Vec<String>,
}

impl DksGlobal {
    pub fn new(m: usize) -> Self {
        DksGlobal {
            l_n: vec![None; 1 << m],
            threshold: Weight::MAX,
            last_s_n: vec![None; 1 << m],
            ..DksGlobal::default()
        }
    }
}

pub struct DksProgram {
    settings: SearchSettings,
    m: usize,
    node_masks: Vec<u32>,
    e_min: Weight,
    agg: DksAggregator,
}

impl DksProgram {
    pub fn new(settings: SearchSettings, m: usize, node_masks: Vec<u32>, e_min: Weight) -> Self {
        let agg = DksAggregator { k: settings.k };
        DksProgram {
            settings,
            m,
            node_masks,
            e_min,
            agg,
        }
    }

    pub fn settings(&self) -> &SearchSettings {
        &self.settings
    }

    fn cap(&self) -> Option<usize> {
        self.settings.filter.then_some(self.settings.k)
    }

    /// Whether `entry`, moved to neighbour `to`, still involves `from`.
    /// Entries that would not are echoes of what `to` already holds.
    fn carries_news(entry: &PartialAnswer, from: NodeId, to: NodeId, w: Weight) -> bool {
        !entry.contains(to) || entry.shift(to, w).contains(from)
    }
}

fn nanos(since: Instant) -> u64 {
    since.elapsed().as_nanos() as u64
}

impl VertexProgram for DksProgram {
    type State = DksVertex;
    type Message = DksMessage;
    type Agg = DksAggregator;
    type Global = DksGlobal;

    fn aggregator(&self) -> &DksAggregator {
        &self.agg
    }

    fn init(&self, _: NodeId) -> DksVertex {
        DksVertex::default()
    }

    fn initially_active(&self, v: NodeId) -> bool {
        self.node_masks[v.index()] != 0
    }

    fn compute(&self, ctx: &mut Context<'_, Self>, st: &mut DksVertex, mut inbox: Vec<DksMessage>) {
        let v = ctx.vertex();
        let superstep = ctx.superstep();
        let global = ctx.global();
        let threshold = if self.settings.threshold_pruning {
            global.threshold
        } else {
            Weight::MAX
        };
        let mut counters = Counters::default();
        let mut phases = PhaseTimes::default();
        let frontier = !inbox.is_empty() && !st.reached;
        if frontier {
            st.reached = true;
            counters.frontier_vertices = 1;
        }

        let started = Instant::now();
        let table = st.table.get_or_insert_with(|| SkVkTable::new(self.m, self.cap()));
        let mut completed = Vec::new();
        if superstep == 0 {
            let own = KeywordSetMask(self.node_masks[v.index()]);
            let seeds = own.keywords().map(|k| PartialAnswer::seed(v, k)).collect();
            let got = table.absorb(seeds, 0, threshold, &self.node_masks);
            counters.entries_kept += got.kept as u64;
            completed.extend(got.completed);
        }
        inbox.sort_by_key(DksMessage::order_key);
        let mut deep_hops = 0u32;
        for msg in inbox {
            let (sender, w, entries) = match msg {
                DksMessage::Bfs(m) => (m.sender, m.edge_weight, m.table),
                DksMessage::Deep(m) => {
                    deep_hops = deep_hops.max(m.hops);
                    (m.sender, m.edge_weight, m.carried)
                }
            };
            if let Err(at) = st.senders.binary_search(&sender) {
                st.senders.insert(at, sender);
            }
            let shifted = entries.iter().map(|e| e.shift(v, w)).collect();
            let got = table.absorb(shifted, superstep, threshold, &self.node_masks);
            counters.entries_kept += got.kept as u64;
            completed.extend(got.completed);
        }
        if deep_hops > 0 {
            counters.deep_receivers = 1;
        }
        phases.receive = nanos(started);

        let full = table.full_mask();
        let delta = table.delta(superstep);
        ctx.vote_to_halt();
        if delta.is_empty() && completed.is_empty() {
            if frontier {
                ctx.contribute(DksContribution {
                    counters,
                    phases,
                    ..DksContribution::default()
                });
            }
            return;
        }

        let started = Instant::now();
        let mut found = Vec::new();
        let mut errors = Vec::new();
        for e in &completed {
            match AnswerTree::from_entry(e, &self.node_masks, self.m)
                .and_then(|a| answer_weight_eq3(&a).map(|_| a))
            {
                Ok(a) => found.push(a),
                Err(err) => errors.push(format!("vertex {v}: {err}")),
            }
        }
        let answers = AAState::default().merge(AAState { topk: found }, self.settings.k);
        phases.evaluate = nanos(started);

        let started = Instant::now();
        // complete answers are never extended
        let delta: Vec<_> = delta.into_iter().filter(|e| e.mask != full).collect();
        let graph = ctx.graph();
        let senders = st.senders.clone();
        for nb in graph.neighbors(v) {
            let back = senders.binary_search(&nb.node).is_ok();
            if back || global.stop {
                continue;
            }
            let table: Vec<_> = delta
                .iter()
                .filter(|e| Self::carries_news(e, v, nb.node, nb.weight))
                .cloned()
                .collect();
            if !table.is_empty() {
                counters.bfs_messages += 1;
                ctx.send(
                    nb.node,
                    DksMessage::Bfs(BfsMessage {
                        sender: v,
                        edge_weight: nb.weight,
                        table,
                    }),
                );
            }
        }
        phases.send_bfs = nanos(started);

        let started = Instant::now();
        let hops = deep_hops + 1;
        if self.settings.deep_messages && hops <= self.settings.max_deep_hops {
            for nb in graph.neighbors(v) {
                if senders.binary_search(&nb.node).is_err() {
                    continue;
                }
                let carried: Vec<_> = delta
                    .iter()
                    .filter(|e| Self::carries_news(e, v, nb.node, nb.weight))
                    .cloned()
                    .collect();
                if !carried.is_empty() {
                    counters.deep_messages += 1;
                    ctx.send(
                        nb.node,
                        DksMessage::Deep(DeepMessage {
                            origin: v,
                            sender: v,
                            edge_weight: nb.weight,
                            hops,
                            carried,
                        }),
                    );
                }
            }
        }
        phases.send_deep = nanos(started);

        let started = Instant::now();
        let mut minima = table.delta_minima(superstep);
        if self.settings.frontier_minima && !(frontier || superstep == 0) {
            minima.iter_mut().for_each(|s| *s = None);
        }
        let samples = if self.settings.record_samples {
            let sparse = minima
                .iter()
                .enumerate()
                .filter_map(|(mask, s)| s.map(|s| (mask as u32, s)))
                .collect();
            vec![VertexSample {
                node: v,
                minima: sparse,
                frontier,
                got_deep: deep_hops > 0,
            }]
        } else {
            Vec::new()
        };
        counters.aggregator_messages = 1 + u64::from(!answers.topk.is_empty());
        phases.send_agg = nanos(started);
        ctx.contribute(DksContribution {
            answers,
            minima: ASState { s_n: minima },
            samples,
            counters,
            phases,
            errors,
        });
    }

    fn master(&self, superstep: usize, g: &mut DksGlobal, mut c: DksContribution) -> MasterAction {
        if !c.errors.is_empty() {
            c.errors.sort();
            g.errors.extend(c.errors);
            return MasterAction::Stop;
        }
        let k = self.settings.k;
        g.topk = std::mem::take(&mut g.topk).merge(c.answers, k);
        g.l_n = g.topk.largest_constituents(self.m);
        let mut s_n = c.minima.s_n;
        s_n.resize(1 << self.m, None);

        let full_k = g.topk.is_full(k);
        let (candidates, stray) = if full_k && self.settings.record_samples {
            c.samples.sort_by_key(|s| s.node);
            let per_vertex: Vec<(NodeId, Vec<(u32, Weight)>)> =
                c.samples.iter().map(|s| (s.node, s.minima.clone())).collect();
            let cands = candidate_nodes(&per_vertex, &g.l_n, self.e_min);
            let stray = c
                .samples
                .iter()
                .filter(|s| cands.binary_search(&s.node).is_ok() && !s.frontier && !s.got_deep)
                .count();
            (Some(cands.len()), stray)
        } else {
            (None, 0)
        };

        let fired =
            self.settings.exit_criterion && full_k && !g.stop && check_exit(&s_n, &g.l_n, self.e_min);
        if fired {
            g.stop = true;
            g.exit_superstep = Some(superstep);
        }
        if self.settings.threshold_pruning {
            g.threshold = g.topk.kth_weight(k).unwrap_or(Weight::MAX);
        }
        g.trace.push(SuperstepTrace {
            superstep,
            s_n: s_n.clone(),
            l_n: g.l_n.clone(),
            answers: g.topk.topk.len(),
            kth_weight: g.topk.kth_weight(k),
            candidates,
            stray_candidates: stray,
            exit_fired: fired,
            counters: c.counters,
            phases: c.phases,
        });
        g.last_s_n = s_n;
        MasterAction::Continue
    }
}
