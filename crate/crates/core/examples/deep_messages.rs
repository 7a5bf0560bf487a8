//! Why answers need messages sent back down explored branches.
//!
//! In `fixtures::unbalanced` both ends of the edge 0-1 hold "bravo", so they
//! message each other first and later forward traversal never crosses that
//! edge again. The "alpha" side (node 2) and the "charlie" side (node 6)
//! only meet through deep messages.
//!
//!     cargo run --example deep_messages

use dks::fixtures;
use dks::oracle::{enumerate_minimal_answer_trees, GstInstance};
use dks::search::{resolve_keyword_nodes, run_with_groups, DksConfig, Query};

fn main() -> anyhow::Result<()> {
    let graph = fixtures::unbalanced();
    let index = graph.build_inverted_index();
    let query = Query::parse("alpha bravo charlie", 1)?;
    let groups = resolve_keyword_nodes(&query, &index)?;

    let oracle = enumerate_minimal_answer_trees(&GstInstance::new(&graph, groups.clone())?, 1)?;
    println!("oracle: {:?}", oracle.weights());

    for deep in [false, true] {
        let mut config = DksConfig::new(1);
        config.search.deep_messages = deep;
        let out = run_with_groups(&graph, &query, &groups, &config)?;
        println!(
            "deep messages {:<5}: answers {:?}, deep sent {}, bfs sent {}",
            deep,
            out.weights(),
            out.deep_messages(),
            out.bfs_messages()
        );
        if let Some(a) = out.answers.first() {
            let edges: Vec<String> = a.edges.iter().map(|e| format!("{}-{}", e.lo, e.hi)).collect();
            println!("    root {}, edges {}", a.root, edges.join(" "));
        }
    }
    Ok(())
}
