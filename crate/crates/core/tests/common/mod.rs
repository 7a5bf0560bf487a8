//! Random small instances shared by the integration and acceptance tests.
#![allow(dead_code)]

use dks::graph::{Graph, NodeId, Weight};
use dks::oracle::{enumerate_minimal_answer_trees, GstInstance};
use dks::search::{run_with_groups, DksConfig, DksOutcome, Query};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const KEYWORDS: [&str; 3] = ["alpha", "bravo", "charlie"];

#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub graph: Graph,
    pub groups: Vec<Vec<NodeId>>,
    pub query: Query,
}

impl Instance {
    pub fn k(&self) -> usize {
        self.query.k
    }

    pub fn run(&self, tweak: impl FnOnce(&mut DksConfig)) -> DksOutcome {
        let mut config = DksConfig::new(self.k());
        tweak(&mut config);
        run_with_groups(&self.graph, &self.query, &self.groups, &config)
            .unwrap_or_else(|e| panic!("seed {}: {e}", self.seed))
    }

    pub fn oracle_weights(&self) -> Vec<Weight> {
        let inst = GstInstance::new(&self.graph, self.groups.clone()).expect("valid instance");
        enumerate_minimal_answer_trees(&inst, self.k()).expect("small instance").weights()
    }
}

/// Connected graph on 3..=12 nodes with weights 1..=4, m in {2,3} and K in
/// {1,2,3}. Node text lists the keywords a node holds, so the inverted
/// index reproduces `groups`.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: u32 = rng.gen_range(3..=12);
    let mut edges: Vec<(u32, u32, Weight)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(1..=4)));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !edges.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)) {
            edges.push((a, b, rng.gen_range(1..=4)));
        }
    }
    let m: usize = rng.gen_range(2..=3);
    let k: usize = rng.gen_range(1..=3);
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for _ in 0..m {
        let size = rng.gen_range(1..=3.min(n as usize));
        let mut g: Vec<NodeId> = (0..size).map(|_| NodeId(rng.gen_range(0..n))).collect();
        g.sort();
        g.dedup();
        groups.push(g);
    }
    let texts: Vec<String> = (0..n)
        .map(|v| {
            groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.contains(&NodeId(v)))
                .map(|(i, _)| KEYWORDS[i])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let graph = Graph::from_weighted_edges(&texts, &edges).add_reverse_edges();
    let keywords = KEYWORDS[..m].iter().map(|s| s.to_string()).collect();
    let query = Query::new(keywords, k, 6).expect("valid query");
    Instance {
        seed,
        graph,
        groups,
        query,
    }
}

pub fn corpus(count: u64) -> impl Iterator<Item = Instance> {
    (0..count).map(|i| random_instance(0x5eed_0000 + i))
}
