//! The engine is usable on its own: single-source shortest paths as a
//! vertex program, with an aggregator counting relaxations per superstep.
//!
//!     cargo run --example custom_program

use dks::bsp::{run_with_observer, Aggregator, Context, EngineConfig, VertexProgram};
use dks::graph::{Graph, NodeId, Weight};

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

struct ShortestPaths {
    source: NodeId,
    sum: Sum,
}

impl VertexProgram for ShortestPaths {
    type State = Option<Weight>;
    type Message = Weight;
    type Agg = Sum;
    type Global = ();

    fn aggregator(&self) -> &Sum {
        &self.sum
    }

    fn init(&self, _v: NodeId) -> Option<Weight> {
        None
    }

    fn initially_active(&self, v: NodeId) -> bool {
        v == self.source
    }

    fn compute(&self, ctx: &mut Context<'_, Self>, dist: &mut Option<Weight>, inbox: Vec<Weight>) {
        let offer = if ctx.superstep() == 0 { Some(0) } else { inbox.into_iter().min() };
        if let Some(d) = offer {
            if dist.map_or(true, |cur| d < cur) {
                *dist = Some(d);
                ctx.contribute(1);
                let v = ctx.vertex();
                let graph = ctx.graph();
                for nb in graph.neighbors(v) {
                    ctx.send(nb.node, d + nb.weight);
                }
            }
        }
        ctx.vote_to_halt();
    }
}

fn main() -> anyhow::Result<()> {
    let graph = Graph::from_weighted_edges(
        &["s", "a", "b", "c", "t"],
        &[(0, 1, 4), (0, 2, 1), (2, 1, 2), (1, 3, 1), (2, 3, 5), (3, 4, 3)],
    )
    .add_reverse_edges();
    let program = ShortestPaths { source: NodeId(0), sum: Sum };
    let config = EngineConfig {
        workers: 2,
        ..EngineConfig::default()
    };
    let out = run_with_observer(&graph, &program, &config, (), |report| {
        println!("superstep {}: {} messages", report.index, report.messages_sent);
    })?;
    for (v, d) in out.states.iter().enumerate() {
        println!("dist({}) = {:?}", graph.text(NodeId(v as u32)), d);
    }
    println!("halted: {:?}", out.halt);
    Ok(())
}
