//! Plain BFS flood on the same engine, used as the bench baseline.

use std::time::{Duration, Instant};

use crate::bsp::{run, Aggregator, Context, EngineConfig, EngineError, HaltReason, VertexProgram};
use crate::graph::{Graph, NodeId};

/// Counts vertices reached for the first time.
pub struct Count;

impl Aggregator for Count {
    type Value = u64;

    fn identity(&self) -> u64 {
        0
    }

    fn combine(&self, a: u64, b: u64) -> u64 {
        a + b
    }
}

/// Every source starts reached; a vertex reached for the first time
/// messages all its neighbours once. Halts when nothing new is reached.
pub struct FloodProgram {
    sources: Vec<bool>,
    count: Count,
}

impl FloodProgram {
    pub fn new(node_count: usize, sources: &[NodeId]) -> Self {
        let mut flags = vec![false; node_count];
        for s in sources {
            flags[s.index()] = true;
        }
        FloodProgram {
            sources: flags,
            count: Count,
        }
    }
}

impl VertexProgram for FloodProgram {
    type State = bool;
    type Message = ();
    type Agg = Count;
    type Global = ();

    fn aggregator(&self) -> &Count {
        &self.count
    }

    fn init(&self, _vertex: NodeId) -> bool {
        false
    }

    fn initially_active(&self, v: NodeId) -> bool {
        self.sources[v.index()]
    }

    fn compute(&self, ctx: &mut Context<'_, Self>, reached: &mut bool, _inbox: Vec<()>) {
        if !*reached {
            *reached = true;
            ctx.contribute(1);
            let v = ctx.vertex();
            let graph = ctx.graph();
            for nb in graph.neighbors(v) {
                ctx.send(nb.node, ());
            }
        }
        ctx.vote_to_halt();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloodReport {
    pub reached: usize,
    pub supersteps: usize,
    pub messages: u64,
    pub halt: HaltReason,
    pub elapsed: Duration,
}

pub fn flood(graph: &Graph, sources: &[NodeId], engine: &EngineConfig) -> Result<FloodReport, EngineError> {
    let program = FloodProgram::new(graph.node_count(), sources);
    let started = Instant::now();
    let out = run(graph, &program, engine, ())?;
    Ok(FloodReport {
        reached: out.states.iter().filter(|&&r| r).count(),
        supersteps: out.supersteps(),
        messages: out.total_messages_sent(),
        halt: out.halt,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flood_reaches_everything_connected() {
        let g = fixtures::unbalanced();
        let r = flood(&g, &[NodeId(2)], &EngineConfig::default()).unwrap();
        assert_eq!(r.reached, 7);
        assert_eq!(r.messages, g.edge_count() as u64);
        assert_eq!(r.halt, HaltReason::AllHalted);
    }
}
