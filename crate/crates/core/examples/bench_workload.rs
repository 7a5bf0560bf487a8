//! Benchmark a generated workload on a synthetic scale-free graph and
//! write the CSV the `dks bench` subcommand produces. Summarises deep
//! message counts and explored node share per K.
//!
//!     cargo run --release --example bench_workload [nodes]

use dks::graph::WeightPolicy;
use dks::harness::{bench, generate_queries, scale_free, write_csv, SynthParams, WorkloadSpec};
use dks::search::DksConfig;

fn main() -> anyhow::Result<()> {
    let nodes = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20_000);
    let graph = scale_free(&SynthParams::new(nodes, 1)).prepare(&WeightPolicy::default())?;
    let index = graph.build_inverted_index();
    let mut spec = WorkloadSpec::new(4, vec![2, 3], 5);
    spec.min_postings = 5;
    spec.max_postings = 5_000;
    let workload = generate_queries(&index, &spec)?;
    let ks = [1, 2, 5, 10];
    let mut template = DksConfig::new(1);
    template.engine.workers = 4;
    let rows = bench(&graph, &index, &workload, &ks, &template);

    let path = std::env::temp_dir().join("dks_bench.csv");
    write_csv(&rows, std::fs::File::create(&path)?)?;
    println!("wrote {} rows to {}", rows.len(), path.display());

    for k in ks {
        let reports: Vec<_> = rows.iter().filter(|r| r.is_dks() && r.k == k).filter_map(|r| r.report.as_ref()).collect();
        let n = reports.len().max(1) as f64;
        let deep = reports.iter().map(|r| r.deep_messages as f64).sum::<f64>() / n;
        let explored = reports.iter().map(|r| r.explored_pct).sum::<f64>() / n;
        let ms = reports.iter().map(|r| r.algorithm_ms).sum::<f64>() / n;
        println!("K={k:>2}: mean deep messages {deep:>10.1}, mean explored {explored:>5.1}%, mean time {ms:>8.1} ms");
    }
    Ok(())
}
