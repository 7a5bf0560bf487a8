//! A small in-process Pregel: hash-partitioned vertices, synchronous
//! supersteps, vote-to-halt and master-side aggregation.
//!
//! Messages sent in superstep `s` are delivered as an unordered batch in
//! `s + 1`. Aggregator contributions are reduced per worker in vertex order
//! and then across workers in worker-index order, so with an associative and
//! commutative `combine` the reduced value does not depend on the worker
//! count.

mod partition;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub use partition::{partition, Partitioning};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub workers: usize,
    /// Most messages one superstep may send before the run is cut.
    pub message_budget: u64,
    pub max_supersteps: usize,
    /// When set, every inbox is shuffled with a generator derived from this
    /// seed. Vertex programs must not care.
    pub shuffle_seed: Option<u64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 1,
            message_budget: 1_000_000,
            max_supersteps: 10_000,
            shuffle_seed: None,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("workers must be >= 1")]
    NoWorkers,
    #[error("message budget must be >= 1")]
    NoBudget,
    #[error("a worker thread panicked")]
    WorkerPanic,
}

/// An associative, commutative reduction with a neutral element.
pub trait Aggregator: Sync {
    type Value: Send;
    fn identity(&self) -> Self::Value;
    fn combine(&self, a: Self::Value, b: Self::Value) -> Self::Value;
}

/// What the master asks the engine to do after a superstep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MasterAction {
    Continue,
    Stop,
}

pub trait VertexProgram: Sync {
    type State: Send;
    type Message: Send;
    type Agg: Aggregator;
    /// Read-only value broadcast to every vertex; only the master writes it.
    type Global: Sync;

    fn aggregator(&self) -> &Self::Agg;

    fn init(&self, vertex: NodeId) -> Self::State;

    /// Vertices not active in superstep 0 sleep until messaged.
    fn initially_active(&self, _vertex: NodeId) -> bool {
        true
    }

    fn compute(
        &self,
        ctx: &mut Context<'_, Self>,
        state: &mut Self::State,
        inbox: Vec<Self::Message>,
    );

    /// Runs after every superstep with that superstep's reduced contributions.
    fn master(
        &self,
        _superstep: usize,
        _global: &mut Self::Global,
        _reduced: <Self::Agg as Aggregator>::Value,
    ) -> MasterAction {
        MasterAction::Continue
    }
}

type AggValue<P> = <<P as VertexProgram>::Agg as Aggregator>::Value;

/// Per-call handle given to [`VertexProgram::compute`].
pub struct Context<'a, P: VertexProgram + ?Sized> {
    vertex: NodeId,
    superstep: usize,
    graph: &'a Graph,
    global: &'a P::Global,
    agg: &'a P::Agg,
    outbox: &'a mut Vec<(NodeId, P::Message)>,
    partial: &'a mut Option<AggValue<P>>,
    halted: bool,
}

impl<'a, P: VertexProgram + ?Sized> Context<'a, P> {
    pub fn vertex(&self) -> NodeId {
        self.vertex
    }

    pub fn superstep(&self) -> usize {
        self.superstep
    }

    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn global(&self) -> &'a P::Global {
        self.global
    }

    pub fn send(&mut self, dst: NodeId, message: P::Message) {
        self.outbox.push((dst, message));
    }

    /// The vertex sleeps from the next superstep on unless a message
    /// arrives. Calling it twice is the same as once.
    pub fn vote_to_halt(&mut self) {
        self.halted = true;
    }

    pub fn contribute(&mut self, value: AggValue<P>) {
        let merged = match self.partial.take() {
            Some(cur) => self.agg.combine(cur, value),
            None => value,
        };
        *self.partial = Some(merged);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperstepReport {
    pub index: usize,
    /// Vertices whose compute ran this superstep.
    pub active_vertices: usize,
    pub messages_delivered: u64,
    pub messages_sent: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    /// Every vertex voted to halt and no message is in flight.
    AllHalted,
    /// The master returned [`MasterAction::Stop`].
    ProgramStop,
    /// A superstep sent more than the budget; its messages were dropped.
    MessageBudget,
    /// `max_supersteps` reached.
    SuperstepCap,
}

pub struct RunOutcome<S, G> {
    /// Final per-vertex state, indexed by node id.
    pub states: Vec<S>,
    pub global: G,
    pub reports: Vec<SuperstepReport>,
    pub halt: HaltReason,
    /// Messages sent but never delivered (non-zero only for budget/cap/stop).
    pub pending_messages: u64,
    /// Vertices that ran compute at least once.
    pub vertices_computed: usize,
}

impl<S, G> RunOutcome<S, G> {
    pub fn supersteps(&self) -> usize {
        self.reports.len()
    }

    pub fn last_report(&self) -> Option<&SuperstepReport> {
        self.reports.last()
    }

    pub fn total_messages_sent(&self) -> u64 {
        self.reports.iter().map(|r| r.messages_sent).sum()
    }

    pub fn total_messages_delivered(&self) -> u64 {
        self.reports.iter().map(|r| r.messages_delivered).sum()
    }
}

struct WorkerPart<S, M> {
    ids: Vec<NodeId>,
    states: Vec<S>,
    active: Vec<bool>,
    computed: Vec<bool>,
    inbox: Vec<Vec<M>>,
}

struct WorkerOutput<M, V> {
    outbox: Vec<(NodeId, M)>,
    partial: Option<V>,
    ran: usize,
    delivered: u64,
}

/// Runs `program` on `graph` until one of the [`HaltReason`]s applies.
pub fn run<P: VertexProgram>(
    graph: &Graph,
    program: &P,
    config: &EngineConfig,
    global: P::Global,
) -> Result<RunOutcome<P::State, P::Global>, EngineError> {
    run_with_observer(graph, program, config, global, |_| {})
}

/// As [`run`], calling `observer` after every superstep (e.g. to stream
/// reports as JSON lines).
pub fn run_with_observer<P: VertexProgram>(
    graph: &Graph,
    program: &P,
    config: &EngineConfig,
    mut global: P::Global,
    mut observer: impl FnMut(&SuperstepReport),
) -> Result<RunOutcome<P::State, P::Global>, EngineError> {
    if config.workers == 0 {
        return Err(EngineError::NoWorkers);
    }
    if config.message_budget == 0 {
        return Err(EngineError::NoBudget);
    }
    let layout = partition(graph, config.workers);
    let mut parts: Vec<WorkerPart<P::State, P::Message>> = layout
        .members
        .iter()
        .map(|ids| WorkerPart {
            ids: ids.clone(),
            states: ids.iter().map(|&v| program.init(v)).collect(),
            active: ids.iter().map(|&v| program.initially_active(v)).collect(),
            computed: vec![false; ids.len()],
            inbox: ids.iter().map(|_| Vec::new()).collect(),
        })
        .collect();

    let mut reports = Vec::new();
    let mut pending = 0u64;
    let halt = 'outer: loop {
        let superstep = reports.len();
        let has_work = parts
            .iter()
            .any(|p| p.active.iter().any(|&a| a) || p.inbox.iter().any(|b| !b.is_empty()));
        if !has_work {
            break HaltReason::AllHalted;
        }
        if superstep >= config.max_supersteps {
            pending = parts
                .iter()
                .flat_map(|p| p.inbox.iter())
                .map(|b| b.len() as u64)
                .sum();
            break HaltReason::SuperstepCap;
        }

        let outputs = {
            let global = &global;
            let step = |w: usize, part: &mut WorkerPart<P::State, P::Message>| {
                run_worker(graph, program, config, global, superstep, w, part)
            };
            if parts.len() == 1 {
                vec![step(0, &mut parts[0])]
            } else {
                let joined: Vec<_> = std::thread::scope(|scope| {
                    let handles: Vec<_> = parts
                        .iter_mut()
                        .enumerate()
                        .map(|(w, part)| scope.spawn(move || step(w, part)))
                        .collect();
                    handles.into_iter().map(|h| h.join()).collect()
                });
                let mut outs = Vec::with_capacity(joined.len());
                for r in joined {
                    match r {
                        Ok(o) => outs.push(o),
                        Err(_) => return Err(EngineError::WorkerPanic),
                    }
                }
                outs
            }
        };

        let agg = program.aggregator();
        let mut reduced = agg.identity();
        let mut report = SuperstepReport {
            index: superstep,
            active_vertices: 0,
            messages_delivered: 0,
            messages_sent: 0,
        };
        let mut outboxes = Vec::with_capacity(outputs.len());
        for out in outputs {
            report.active_vertices += out.ran;
            report.messages_delivered += out.delivered;
            report.messages_sent += out.outbox.len() as u64;
            if let Some(p) = out.partial {
                reduced = agg.combine(reduced, p);
            }
            outboxes.push(out.outbox);
        }
        let action = program.master(superstep, &mut global, reduced);
        observer(&report);
        let sent = report.messages_sent;
        reports.push(report);

        if sent > config.message_budget {
            pending = sent;
            break 'outer HaltReason::MessageBudget;
        }
        if action == MasterAction::Stop {
            pending = sent;
            break 'outer HaltReason::ProgramStop;
        }
        for outbox in outboxes {
            for (dst, msg) in outbox {
                let (w, local) = layout.locate(dst);
                parts[w].inbox[local].push(msg);
            }
        }
    };

    let vertices_computed = parts
        .iter()
        .map(|p| p.computed.iter().filter(|&&c| c).count())
        .sum();
    let mut slots: Vec<Option<P::State>> = (0..graph.node_count()).map(|_| None).collect();
    for part in parts {
        for (id, state) in part.ids.into_iter().zip(part.states) {
            slots[id.index()] = Some(state);
        }
    }
    Ok(RunOutcome {
        states: slots.into_iter().map(|s| s.expect("every vertex assigned")).collect(),
        global,
        reports,
        halt,
        pending_messages: pending,
        vertices_computed,
    })
}

fn run_worker<P: VertexProgram>(
    graph: &Graph,
    program: &P,
    config: &EngineConfig,
    global: &P::Global,
    superstep: usize,
    worker: usize,
    part: &mut WorkerPart<P::State, P::Message>,
) -> WorkerOutput<P::Message, AggValue<P>> {
    let mut rng = config.shuffle_seed.map(|seed| {
        ChaCha8Rng::seed_from_u64(seed ^ ((superstep as u64) << 20) ^ worker as u64)
    });
    let agg = program.aggregator();
    let mut outbox = Vec::new();
    let mut partial = None;
    let mut ran = 0;
    let mut delivered = 0u64;
    for i in 0..part.ids.len() {
        if !part.active[i] && part.inbox[i].is_empty() {
            continue;
        }
        let mut inbox = std::mem::take(&mut part.inbox[i]);
        delivered += inbox.len() as u64;
        if let Some(rng) = rng.as_mut() {
            inbox.shuffle(rng);
        }
        let mut ctx = Context::<P> {
            vertex: part.ids[i],
            superstep,
            graph,
            global,
            agg,
            outbox: &mut outbox,
            partial: &mut partial,
            halted: false,
        };
        program.compute(&mut ctx, &mut part.states[i], inbox);
        part.active[i] = !ctx.halted;
        part.computed[i] = true;
        ran += 1;
    }
    WorkerOutput {
        outbox,
        partial,
        ran,
        delivered,
    }
}

#[cfg(test)]
mod tests;
