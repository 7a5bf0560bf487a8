//! Watch the early-exit test at work: per superstep, the smallest new
//! path-length per keyword-set (S), the largest constituent length among
//! the current top-K (L) and whether the stop flag went up.
//!
//!     cargo run --example exit_trace

use dks::fixtures;
use dks::search::{run_query, DksConfig, KeywordSetMask, Query};

fn fmt(row: &[Option<u64>]) -> String {
    row.iter()
        .enumerate()
        .filter_map(|(mask, w)| w.map(|w| format!("{}={w}", KeywordSetMask(mask as u32))))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> anyhow::Result<()> {
    let graph = fixtures::unbalanced();
    let index = graph.build_inverted_index();
    for (text, k) in [("bravo charlie", 1), ("alpha bravo charlie", 1)] {
        let query = Query::parse(text, k)?;
        let out = run_query(&graph, &index, &query, &DksConfig::new(k))?;
        println!("query {text:?}, K={k}, e_min={}", out.e_min);
        for t in &out.trace {
            println!(
                "  ss {:>2}  answers {}  S: {:<56} L: {:<24} candidates {:>4}  {}",
                t.superstep,
                t.answers,
                fmt(&t.s_n),
                fmt(&t.l_n),
                t.candidates.map_or("-".into(), |c| c.to_string()),
                if t.exit_fired { "EXIT" } else { "" }
            );
        }
        println!("  best {:?}, halt {}\n", out.best(), out.halt.as_str());
    }
    Ok(())
}
