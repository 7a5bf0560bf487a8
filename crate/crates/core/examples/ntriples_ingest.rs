//! Load RDF N-Triples, weight edges by target in-degree, and query.
//! IRIs become nodes named by their local part; literals join their
//! subject's text; predicates label edges.
//!
//!     cargo run --example ntriples_ingest

use dks::graph::{read_ntriples, WeightPolicy};
use dks::search::{run_query, DksConfig, Query};

const DATA: &str = r#"
<http://ex.org/alice> <http://ex.org/worksAt> <http://ex.org/acme> .
<http://ex.org/alice> <http://ex.org/name> "Alice Smith" .
<http://ex.org/bob> <http://ex.org/worksAt> <http://ex.org/acme> .
<http://ex.org/bob> <http://ex.org/knows> <http://ex.org/carol> .
<http://ex.org/carol> <http://ex.org/livesIn> <http://ex.org/berlin> .
<http://ex.org/acme> <http://ex.org/locatedIn> <http://ex.org/berlin> .
<http://ex.org/carol> <http://ex.org/name> "Carol Jones" .
"#;

fn main() -> anyhow::Result<()> {
    let graph = read_ntriples(DATA.as_bytes())?.prepare(&WeightPolicy::default())?;
    let index = graph.build_inverted_index();
    println!("{} nodes, {} directed edges after closure", graph.node_count(), graph.edge_count());

    let query = Query::parse("alice carol", 2)?;
    let out = run_query(&graph, &index, &query, &DksConfig::new(query.k))?;
    for a in &out.answers {
        let path: Vec<String> = a
            .edges
            .iter()
            .map(|e| {
                let label = graph.edge_label(e.lo, e.hi).or_else(|| graph.edge_label(e.hi, e.lo)).unwrap_or("?");
                format!("{} -{label}- {}", graph.text(e.lo), graph.text(e.hi))
            })
            .collect();
        println!("weight {}: {}", a.weight, path.join(", "));
    }
    Ok(())
}
