//! Cutting a query short with a per-superstep message budget and reading
//! the smallest-possible-answer estimate that comes back with it.
//!
//!     cargo run --example budget_spa

use dks::graph::WeightPolicy;
use dks::harness::{scale_free, SynthParams};
use dks::search::{run_query, DksConfig, DksHalt, Query};

fn main() -> anyhow::Result<()> {
    let graph = scale_free(&SynthParams::new(20_000, 11)).prepare(&WeightPolicy::default())?;
    let index = graph.build_inverted_index();
    // two mid-frequency tokens
    let mut mid: Vec<(&str, usize)> = index.frequencies().filter(|&(_, n)| (20..60).contains(&n)).collect();
    mid.sort_by_key(|&(t, n)| (n, t.to_string()));
    let query = Query::new(vec![mid[0].0.into(), mid[1].0.into()], 3, 6)?;
    println!("query {:?} over {} nodes", query.text(), graph.node_count());

    for budget in [1_000_000u64, 20_000, 5_000, 1_000] {
        let mut config = DksConfig::new(query.k);
        config.engine.message_budget = budget;
        let out = run_query(&graph, &index, &query, &config)?;
        let note = match out.halt {
            DksHalt::Exit => "proven top-K".to_string(),
            _ => format!("spa_weight {:?}, spa_ratio {:?}", out.spa_weight, out.spa_ratio),
        };
        println!(
            "budget {budget:>9}: halt {:<6} supersteps {:>2} answers {:?} {note}",
            out.halt.as_str(),
            out.supersteps,
            out.weights()
        );
    }
    Ok(())
}
