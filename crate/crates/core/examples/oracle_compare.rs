//! Cross-check the distributed search against brute force on random small
//! graphs: top-K weight lists must agree exactly.
//!
//!     cargo run --example oracle_compare

use dks::graph::{Graph, NodeId};
use dks::oracle::{enumerate_minimal_answer_trees, gst_optimal_dp, GstInstance};
use dks::search::{run_with_groups, DksConfig, Query};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut agree, total) = (0, 100);
    for _ in 0..total {
        let n: u32 = rng.gen_range(4..=10);
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v, rng.gen_range(1..=4)));
        }
        for _ in 0..n / 2 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && !edges.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)) {
                edges.push((a, b, rng.gen_range(1..=4)));
            }
        }
        let texts = vec![""; n as usize];
        let graph = Graph::from_weighted_edges(&texts, &edges).add_reverse_edges();
        let groups: Vec<Vec<NodeId>> = (0..3).map(|_| vec![NodeId(rng.gen_range(0..n))]).collect();
        let query = Query::parse("q1 q2 q3", 2)?;

        let out = run_with_groups(&graph, &query, &groups, &DksConfig::new(2))?;
        let inst = GstInstance::new(&graph, groups)?;
        let exact = enumerate_minimal_answer_trees(&inst, 2)?;
        assert_eq!(exact.answers.first().map(|a| a.weight), gst_optimal_dp(&inst));
        if out.weights() == exact.weights() {
            agree += 1;
        } else {
            println!("disagree: dks {:?} oracle {:?}", out.weights(), exact.weights());
        }
    }
    println!("{agree}/{total} instances agree with the oracle");
    Ok(())
}
