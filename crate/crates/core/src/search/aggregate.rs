use serde::{Deserialize, Serialize};

use super::AnswerTree;
use crate::bsp::Aggregator;
use crate::graph::{NodeId, Weight};

/// Global top-K answers (A_A).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AAState {
    /// Ascending by (weight, canonical key); keys distinct.
    pub topk: Vec<AnswerTree>,
}

impl AAState {
    /// Union of both lists, one answer per canonical key (smallest root
    /// wins), truncated to `k`.
    pub fn merge(mut self, other: AAState, k: usize) -> AAState {
        self.topk.extend(other.topk);
        self.topk.sort_by(|a, b| a.rank_cmp(b));
        self.topk.dedup_by(|b, a| a.canonical_key() == b.canonical_key());
        self.topk.truncate(k);
        self
    }

    pub fn is_full(&self, k: usize) -> bool {
        self.topk.len() >= k
    }

    /// Weight of the K-th answer once K answers exist.
    pub fn kth_weight(&self, k: usize) -> Option<Weight> {
        self.is_full(k).then(|| self.topk[k - 1].weight)
    }

    /// L_n: per mask, the largest constituent path-length over the top-K.
    /// Masks that are no answer's constituent stay `None` (unbounded).
    pub fn largest_constituents(&self, m: usize) -> Vec<Option<Weight>> {
        let mut l = vec![None; 1 << m];
        for a in &self.topk {
            for &(mask, w) in &a.constituents {
                let slot: &mut Option<Weight> = &mut l[mask.index()];
                *slot = Some(slot.map_or(w, |cur| cur.max(w)));
            }
        }
        l
    }
}

/// Per-mask minima over active vertices (A_S).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ASState {
    pub s_n: Vec<Option<Weight>>,
}

impl ASState {
    pub fn merge(self, other: ASState) -> ASState {
        let (mut long, short) = if self.s_n.len() >= other.s_n.len() {
            (self.s_n, other.s_n)
        } else {
            (other.s_n, self.s_n)
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a = match (*a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
        }
        ASState { s_n: long }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub bfs_messages: u64,
    pub deep_messages: u64,
    /// One per contribution sent to A_A or A_S.
    pub aggregator_messages: u64,
    /// Vertices receiving a message for the first time.
    pub frontier_vertices: u64,
    pub deep_receivers: u64,
    pub entries_kept: u64,
}

impl Counters {
    fn add(self, o: Counters) -> Counters {
        Counters {
            bfs_messages: self.bfs_messages + o.bfs_messages,
            deep_messages: self.deep_messages + o.deep_messages,
            aggregator_messages: self.aggregator_messages + o.aggregator_messages,
            frontier_vertices: self.frontier_vertices + o.frontier_vertices,
            deep_receivers: self.deep_receivers + o.deep_receivers,
            entries_kept: self.entries_kept + o.entries_kept,
        }
    }
}

/// Nanoseconds spent per phase, summed over vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub send_bfs: u64,
    pub receive: u64,
    pub send_deep: u64,
    pub send_agg: u64,
    pub evaluate: u64,
}

impl PhaseTimes {
    pub fn add(self, o: PhaseTimes) -> PhaseTimes {
        PhaseTimes {
            send_bfs: self.send_bfs + o.send_bfs,
            receive: self.receive + o.receive,
            send_deep: self.send_deep + o.send_deep,
            send_agg: self.send_agg + o.send_agg,
            evaluate: self.evaluate + o.evaluate,
        }
    }

    pub fn total(&self) -> u64 {
        self.send_bfs + self.receive + self.send_deep + self.send_agg + self.evaluate
    }
}

/// Per-vertex record used for candidate accounting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSample {
    pub node: NodeId,
    /// `(mask, smallest new path-length)` for masks with new entries.
    pub minima: Vec<(u32, Weight)>,
    pub frontier: bool,
    pub got_deep: bool,
}

/// Everything one superstep reports to the master.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DksContribution {
    pub answers: AAState,
    pub minima: ASState,
    /// In arrival order; the master sorts.
    pub samples: Vec<VertexSample>,
    pub counters: Counters,
    pub phases: PhaseTimes,
    /// Bookkeeping failures; any entry aborts the query.
    pub errors: Vec<String>,
}

pub struct DksAggregator {
    pub k: usize,
}

impl Aggregator for DksAggregator {
    type Value = DksContribution;

    fn identity(&self) -> DksContribution {
        DksContribution::default()
    }

    fn combine(&self, a: DksContribution, b: DksContribution) -> DksContribution {
        let mut samples = a.samples;
        samples.extend(b.samples);
        let mut errors = a.errors;
        errors.extend(b.errors);
        DksContribution {
            answers: a.answers.merge(b.answers, self.k),
            minima: a.minima.merge(b.minima),
            samples,
            counters: a.counters.add(b.counters),
            phases: a.phases.add(b.phases),
            errors,
        }
    }
}
