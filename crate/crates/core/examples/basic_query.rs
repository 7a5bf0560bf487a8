//! Smallest end-to-end use: build a graph, index it, ask for the top-K
//! answer trees and print them as JSON.
//!
//!     cargo run --example basic_query

use dks::graph::Graph;
use dks::search::{run_query, DksConfig, Query};

fn main() -> anyhow::Result<()> {
    // v0 - v1 - v2 - v3 with a shortcut v0 - v3 that is heavier than the path
    let graph = Graph::from_weighted_edges(
        &["alpha", "", "gamma", "delta"],
        &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 5)],
    )
    .add_reverse_edges();
    let index = graph.build_inverted_index();

    let query = Query::parse("alpha delta", 2)?;
    let outcome = run_query(&graph, &index, &query, &DksConfig::new(query.k))?;

    println!("{}", serde_json::to_string_pretty(&outcome.to_json(&graph))?);
    for a in &outcome.answers {
        println!("weight {} rooted at {} over {} edges", a.weight, a.root, a.edges.len());
    }
    Ok(())
}
