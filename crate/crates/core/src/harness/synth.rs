//! Synthetic scale-free graphs with Zipf-distributed node text.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, Node, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub nodes: usize,
    /// Edges each new node attaches with (preferential attachment).
    pub edges_per_node: usize,
    pub vocabulary: usize,
    pub zipf_exponent: f64,
    /// Each node gets 1..=this many tokens.
    pub max_tokens_per_node: usize,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(nodes: usize, seed: u64) -> Self {
        SynthParams {
            nodes,
            edges_per_node: 2,
            vocabulary: 20_000,
            zipf_exponent: 1.0,
            max_tokens_per_node: 3,
            seed,
        }
    }
}

pub fn token(rank: u64) -> String {
    format!("w{rank}")
}

/// Barabasi-Albert graph. Edges point from the newer node to the older one,
/// so hubs collect in-degree, and carry no weight: run
/// [`Graph::prepare`] to assign step weights and add reverse edges.
pub fn scale_free(p: &SynthParams) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let m = p.edges_per_node.max(1);
    let seed_nodes = (m + 1).min(p.nodes);
    let mut edges = Vec::with_capacity(p.nodes * m);
    // endpoint multiset; sampling from it is degree-proportional
    let mut ends: Vec<u32> = Vec::with_capacity(2 * p.nodes * m);
    for a in 0..seed_nodes as u32 {
        for b in 0..a {
            edges.push((a, b));
            ends.extend([a, b]);
        }
    }
    let mut picked: Vec<u32> = Vec::with_capacity(m);
    for v in seed_nodes as u32..p.nodes as u32 {
        picked.clear();
        while picked.len() < m {
            let t = ends[rng.gen_range(0..ends.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            edges.push((v, t));
            ends.extend([v, t]);
        }
    }

    let zipf = Zipf::new(p.vocabulary as u64, p.zipf_exponent).expect("vocabulary >= 1 and exponent > 0");
    let nodes = (0..p.nodes)
        .map(|i| {
            let count = rng.gen_range(1..=p.max_tokens_per_node.max(1));
            let words: Vec<String> = (0..count).map(|_| token(zipf.sample(&mut rng) as u64)).collect();
            Node {
                id: NodeId::from(i),
                text: words.join(" "),
            }
        })
        .collect();
    let edges = edges
        .into_iter()
        .map(|(s, d)| Edge {
            src: NodeId(s),
            dst: NodeId(d),
            weight: None,
            label: None,
        })
        .collect();
    Graph::from_parts(nodes, edges)
}
