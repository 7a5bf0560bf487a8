use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn dks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dks")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn run_on_edge_list_files() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("nodes.tsv");
    let edges = dir.path().join("edges.tsv");
    fs::write(&nodes, "# id\ttext\n0\talpha\n1\t\n2\t\n3\tdelta\n").unwrap();
    fs::write(&edges, "0\t1\t1\n1\t2\t1\n2\t3\t1\n").unwrap();
    let metrics = dir.path().join("metrics.jsonl");
    let out = dks(&[
        "run",
        "--graph-nodes",
        nodes.to_str().unwrap(),
        "--graph-edges",
        edges.to_str().unwrap(),
        "--query",
        "alpha delta",
        "--k",
        "1",
        "--oracle-check",
        "--metrics",
        metrics.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["answers"][0]["weight"], 3);
    assert_eq!(v["halt_reason"], "exit");
    assert_eq!(v["spa_ratio"], 0.0);
    assert_eq!(v["optimal"], true);
    let lines: Vec<Value> = fs::read_to_string(&metrics)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), v["supersteps"].as_u64().unwrap() as usize);
    assert_eq!(lines[1]["s_n"]["{q1}"], 1);
}

#[test]
fn unweighted_edges_get_step_weights() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("n.tsv");
    let edges = dir.path().join("e.tsv");
    fs::write(&nodes, "0\talpha\n1\thub\n2\tdelta\n").unwrap();
    fs::write(&edges, "0\t1\n2\t1\n").unwrap();
    let out = dks(&["run", "--graph-nodes", n(&nodes), "--graph-edges", n(&edges), "--query", "alpha delta"]);
    assert_eq!(out.status.code(), Some(0));
    // in-degree of the hub is 2 before closure, so both edges weigh 1
    assert_eq!(json(&out)["answers"][0]["weight"], 2);
}

fn n(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_keyword_exit_code() {
    let out = dks(&["run", "--fixture", "path4", "--query", "alpha zulu"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zulu"));
}

#[test]
fn budget_exit_code_and_spa_fields() {
    let out = dks(&["run", "--fixture", "star3", "--query", "alpha bravo", "--max-messages", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["halt_reason"], "budget");
    assert!(v["spa_weight"].is_u64());
    assert!(v["spa_ratio"].is_f64());
}

#[test]
fn oracle_subcommand_lists_trees() {
    let out = dks(&["oracle", "--fixture", "unbalanced", "--query", "alpha bravo charlie", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["answers"][0]["weight"], 8);
    assert_eq!(v["answers"].as_array().unwrap().len(), 1);
}

#[test]
fn ntriples_input() {
    let dir = tempfile::tempdir().unwrap();
    let nt = dir.path().join("g.nt");
    fs::write(
        &nt,
        "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/b> <http://x/p> <http://x/c> .\n<http://x/a> <http://x/name> \"Ann\" .\n",
    )
    .unwrap();
    let out = dks(&["run", "--ntriples", n(&nt), "--query", "ann c"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["answers"][0]["edges"][0]["label"], "p");
}

#[test]
fn gen_queries_then_bench() {
    let dir = tempfile::tempdir().unwrap();
    let workload = dir.path().join("queries.txt");
    let csv_path = dir.path().join("bench.csv");
    let gen = dks(&[
        "gen-queries", "--synthetic", "2000", "--seed", "3", "--per-count", "2", "--counts", "2,3", "--output", n(&workload),
    ]);
    assert_eq!(gen.status.code(), Some(0), "{}", String::from_utf8_lossy(&gen.stderr));
    let text = fs::read_to_string(&workload).unwrap();
    assert_eq!(text.lines().count(), 4);
    let again = dks(&["gen-queries", "--synthetic", "2000", "--seed", "3", "--per-count", "2", "--counts", "2,3"]);
    assert_eq!(String::from_utf8_lossy(&again.stdout), text);

    let bench = dks(&[
        "bench", "--synthetic", "2000", "--seed", "3", "--workload", n(&workload), "--ks", "1,2", "--output", n(&csv_path),
    ]);
    assert_eq!(bench.status.code(), Some(0), "{}", String::from_utf8_lossy(&bench.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, dks::harness::CSV_COLUMNS);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4 * 2 + 1);
    assert_eq!(&rows[8][0], "bfs");
}

#[test]
fn missing_graph_is_a_usage_error() {
    let out = dks(&["run", "--query", "alpha"]);
    assert_eq!(out.status.code(), Some(2));
}
