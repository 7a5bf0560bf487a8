use super::*;
use crate::graph::Graph;
use proptest::prelude::*;

struct Sum;

impl Aggregator for Sum {
    type Value = u64;
    fn identity(&self) -> u64 {
        0
    }
    fn combine(&self, a: u64, b: u64) -> u64 {
        a + b
    }
}

fn path(n: u32) -> Graph {
    let texts = vec![""; n as usize];
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1)).collect();
    Graph::from_weighted_edges(&texts, &edges).add_reverse_edges()
}

fn star(leaves: u32) -> Graph {
    let texts = vec![""; leaves as usize + 1];
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i, 1)).collect();
    Graph::from_weighted_edges(&texts, &edges).add_reverse_edges()
}

/// Votes to halt immediately.
struct Idle;

impl VertexProgram for Idle {
    type State = ();
    type Message = ();
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) {}
    fn compute(&self, ctx: &mut Context<'_, Self>, _: &mut (), _: Vec<()>) {
        ctx.vote_to_halt();
        ctx.vote_to_halt();
    }
}

#[test]
fn idle_program_halts_after_superstep_zero() {
    let out = run(&path(4), &Idle, &EngineConfig::default(), ()).unwrap();
    assert_eq!(out.halt, HaltReason::AllHalted);
    assert_eq!(out.supersteps(), 1);
    assert_eq!(out.last_report().unwrap().index, 0);
    assert_eq!(out.pending_messages, 0);
}

struct Asleep;

impl VertexProgram for Asleep {
    type State = ();
    type Message = ();
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) {}
    fn initially_active(&self, _: NodeId) -> bool {
        false
    }
    fn compute(&self, _: &mut Context<'_, Self>, _: &mut (), _: Vec<()>) {
        unreachable!("nothing is active");
    }
}

#[test]
fn nothing_active_halts_immediately() {
    let out = run(&path(3), &Asleep, &EngineConfig::default(), ()).unwrap();
    assert_eq!(out.halt, HaltReason::AllHalted);
    assert_eq!(out.supersteps(), 0);
    assert_eq!(out.vertices_computed, 0);
}

/// Vertex 0 pokes vertex 1 once; everyone else sleeps. Records the
/// supersteps each vertex ran in.
struct Poke;

impl VertexProgram for Poke {
    type State = Vec<usize>;
    type Message = u32;
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) -> Vec<usize> {
        Vec::new()
    }
    fn compute(&self, ctx: &mut Context<'_, Self>, ran: &mut Vec<usize>, inbox: Vec<u32>) {
        ran.push(ctx.superstep());
        if ctx.superstep() == 0 && ctx.vertex() == NodeId(0) {
            ctx.send(NodeId(1), 7);
        }
        if ctx.superstep() == 3 && ctx.vertex() == NodeId(1) {
            ctx.send(NodeId(2), 1);
        }
        assert!(inbox.iter().all(|&m| m == 7 || m == 1));
        ctx.vote_to_halt();
    }
}

#[test]
fn message_wakes_halted_vertex() {
    let out = run(&path(3), &Poke, &EngineConfig::default(), ()).unwrap();
    assert_eq!(out.states[1], vec![0, 1]);
    assert_eq!(out.states[2], vec![0]);
    assert_eq!(out.halt, HaltReason::AllHalted);
}

/// Each vertex forwards one token to its successor on a ring, forever.
struct Ring {
    n: u32,
}

impl VertexProgram for Ring {
    type State = u64;
    type Message = ();
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) -> u64 {
        0
    }
    fn compute(&self, ctx: &mut Context<'_, Self>, seen: &mut u64, inbox: Vec<()>) {
        *seen += inbox.len() as u64;
        let next = NodeId((ctx.vertex().0 + 1) % self.n);
        ctx.send(next, ());
        ctx.contribute(1);
    }
}

#[test]
fn echo_delivers_one_per_vertex_per_superstep() {
    let config = EngineConfig {
        max_supersteps: 5,
        ..EngineConfig::default()
    };
    let out = run(&path(4), &Ring { n: 4 }, &config, ()).unwrap();
    assert_eq!(out.halt, HaltReason::SuperstepCap);
    assert_eq!(out.supersteps(), 5);
    assert_eq!(out.reports[0].messages_delivered, 0);
    for r in &out.reports[1..] {
        assert_eq!(r.messages_delivered, 4);
        assert_eq!(r.messages_sent, 4);
    }
    assert_eq!(out.pending_messages, 4);
}

/// Every vertex floods all neighbours in superstep 0.
struct Flood;

impl VertexProgram for Flood {
    type State = ();
    type Message = ();
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) {}
    fn initially_active(&self, v: NodeId) -> bool {
        v == NodeId(0)
    }
    fn compute(&self, ctx: &mut Context<'_, Self>, _: &mut (), _: Vec<()>) {
        for n in ctx.graph().neighbors(ctx.vertex()) {
            ctx.send(n.node, ());
        }
        ctx.vote_to_halt();
    }
}

#[test]
fn budget_cuts_the_next_superstep() {
    let config = EngineConfig {
        message_budget: 10,
        ..EngineConfig::default()
    };
    let out = run(&star(20), &Flood, &config, ()).unwrap();
    assert_eq!(out.halt, HaltReason::MessageBudget);
    assert_eq!(out.supersteps(), 1);
    assert_eq!(out.pending_messages, 20);
}

struct StopAfter(usize);

impl VertexProgram for StopAfter {
    type State = ();
    type Message = ();
    type Agg = Sum;
    type Global = ();
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, _: NodeId) {}
    fn compute(&self, _: &mut Context<'_, Self>, _: &mut (), _: Vec<()>) {}
    fn master(&self, superstep: usize, _: &mut (), _: u64) -> MasterAction {
        if superstep + 1 >= self.0 {
            MasterAction::Stop
        } else {
            MasterAction::Continue
        }
    }
}

#[test]
fn master_can_stop_the_run() {
    let out = run(&path(3), &StopAfter(3), &EngineConfig::default(), ()).unwrap();
    assert_eq!(out.halt, HaltReason::ProgramStop);
    assert_eq!(out.supersteps(), 3);
}

#[test]
fn invalid_configs_rejected() {
    let g = path(2);
    let zero_workers = EngineConfig {
        workers: 0,
        ..EngineConfig::default()
    };
    assert_eq!(run(&g, &Idle, &zero_workers, ()).err(), Some(EngineError::NoWorkers));
    let zero_budget = EngineConfig {
        message_budget: 0,
        ..EngineConfig::default()
    };
    assert_eq!(run(&g, &Idle, &zero_budget, ()).err(), Some(EngineError::NoBudget));
}

/// Min-label propagation (connected components). Order-insensitive.
struct MinLabel;

impl VertexProgram for MinLabel {
    type State = u32;
    type Message = u32;
    type Agg = Sum;
    /// Sum of labels changed, accumulated by the master across supersteps.
    type Global = Vec<u64>;
    fn aggregator(&self) -> &Sum {
        &Sum
    }
    fn init(&self, v: NodeId) -> u32 {
        v.0
    }
    fn compute(&self, ctx: &mut Context<'_, Self>, label: &mut u32, inbox: Vec<u32>) {
        let best = inbox.iter().copied().min().unwrap_or(u32::MAX);
        if ctx.superstep() == 0 || best < *label {
            *label = (*label).min(best);
            ctx.contribute(*label as u64);
            for n in ctx.graph().neighbors(ctx.vertex()) {
                ctx.send(n.node, *label);
            }
        }
        ctx.vote_to_halt();
    }
    fn master(&self, _: usize, trace: &mut Vec<u64>, reduced: u64) -> MasterAction {
        trace.push(reduced);
        MasterAction::Continue
    }
}

fn random_graph(n: u32, extra: &[(u32, u32)]) -> Graph {
    let texts = vec![""; n as usize];
    let mut edges: Vec<(u32, u32, u64)> = Vec::new();
    for &(a, b) in extra {
        let (a, b) = (a % n, b % n);
        if a != b {
            edges.push((a, b, 1));
        }
    }
    Graph::from_weighted_edges(&texts, &edges).add_reverse_edges()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn worker_count_and_shuffle_do_not_change_results(
        n in 2u32..40,
        extra in prop::collection::vec((0u32..40, 0u32..40), 0..80),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, &extra);
        let base = run(&g, &MinLabel, &EngineConfig::default(), Vec::new()).unwrap();
        prop_assert_eq!(base.halt, HaltReason::AllHalted);
        prop_assert_eq!(base.pending_messages, 0);
        prop_assert_eq!(base.total_messages_sent(), base.total_messages_delivered());
        for workers in [2, 4] {
            for shuffle_seed in [None, Some(seed)] {
                let config = EngineConfig { workers, shuffle_seed, ..EngineConfig::default() };
                let other = run(&g, &MinLabel, &config, Vec::new()).unwrap();
                prop_assert_eq!(&other.states, &base.states);
                prop_assert_eq!(&other.global, &base.global);
                prop_assert_eq!(&other.reports, &base.reports);
            }
        }
    }

    #[test]
    fn sum_aggregator_is_order_insensitive(mut xs in prop::collection::vec(0u64..1000, 0..50), seed in any::<u64>()) {
        let fold = |v: &[u64]| v.iter().fold(Sum.identity(), |a, &b| Sum.combine(a, b));
        let before = fold(&xs);
        xs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(fold(&xs), before);
        prop_assert_eq!(Sum.combine(Sum.identity(), 5), 5);
    }
}
