//! Node-labeled, edge-weighted graphs: ingestion, reverse-edge closure,
//! degree-step edge weights and the text inverted index.

mod index;
mod io;
mod weights;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use index::{tokenize, InvertedIndex};
pub use io::{read_edge_list, read_ntriples, write_edge_list};
pub use weights::{WeightMode, WeightPolicy};

/// Edge lengths are exact integers; every answer weight is therefore exact.
pub type Weight = u64;

/// Dense, 0-based vertex identifier.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub text: String,
}

/// A directed edge. `weight` is `None` until [`Graph::assign_step_weights`]
/// has run on a graph loaded without a weight column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: Option<Weight>,
    pub label: Option<String>,
}

/// One entry of a vertex's outgoing adjacency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub node: NodeId,
    pub weight: Weight,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: dangling endpoint {id}")]
    DanglingEndpoint { line: usize, id: u64 },
    #[error("line {line}: edge weight must be positive")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: self-loop on node {id}")]
    SelfLoop { line: usize, id: u64 },
    #[error("node ids must be dense 0..{count}, found {id}")]
    SparseIds { id: u64, count: usize },
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge {src}->{dst} has no weight; assign weights first")]
    Unweighted { src: NodeId, dst: NodeId },
    #[error("weight policy: {0}")]
    Policy(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Immutable once built; shared read-only by every worker.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Neighbor>>,
    e_min: Option<Weight>,
}

impl Graph {
    /// Builds a graph from parts. Edge endpoints must be valid node ids.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Self {
        let mut g = Graph {
            nodes,
            edges,
            adjacency: Vec::new(),
            e_min: None,
        };
        g.rebuild();
        g
    }

    /// Convenience for tests and examples: `texts[i]` is the text of node `i`.
    pub fn from_weighted_edges<S: AsRef<str>>(
        texts: &[S],
        edges: &[(u32, u32, Weight)],
    ) -> Self {
        let nodes = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Node {
                id: NodeId::from(i),
                text: t.as_ref().to_string(),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(s, d, w)| Edge {
                src: NodeId(s),
                dst: NodeId(d),
                weight: Some(w),
                label: None,
            })
            .collect();
        Graph::from_parts(nodes, edges)
    }

    /// Loads and prepares a graph in one go: step weights if the edge file
    /// carried none (or the policy demands it), then reverse closure.
    pub fn prepare(self, policy: &WeightPolicy) -> Result<Graph> {
        let needs_weights = policy.mode == WeightMode::DegreeStep
            || self.edges.iter().any(|e| e.weight.is_none());
        let g = if needs_weights {
            self.assign_step_weights(policy)?
        } else {
            self
        };
        let g = g.add_reverse_edges();
        g.min_edge_weight()?;
        Ok(g)
    }

    fn rebuild(&mut self) {
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if let Some(w) = e.weight {
                adjacency[e.src.index()].push(Neighbor {
                    node: e.dst,
                    weight: w,
                });
            }
        }
        // Parallel edges collapse to the lightest one.
        for list in &mut adjacency {
            list.sort_by_key(|n| (n.node, n.weight));
            list.dedup_by_key(|n| n.node);
        }
        self.e_min = self.edges.iter().filter_map(|e| e.weight).min();
        self.adjacency = adjacency;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of directed edges, |E|.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn text(&self, v: NodeId) -> &str {
        &self.nodes[v.index()].text
    }

    /// Outgoing neighbors of `v`, sorted by id, parallel edges collapsed.
    pub fn neighbors(&self, v: NodeId) -> &[Neighbor] {
        &self.adjacency[v.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::from)
    }

    /// Label of some edge `src -> dst`, if any was ingested with one.
    pub fn edge_label(&self, src: NodeId, dst: NodeId) -> Option<&str> {
        self.edges
            .iter()
            .find(|e| (e.src == src && e.dst == dst) || (e.src == dst && e.dst == src))
            .and_then(|e| e.label.as_deref())
    }

    /// In-degree of every node, counted on the edges as they stand.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            deg[e.dst.index()] += 1;
        }
        deg
    }

    /// Adds `(v,u,w)` for every `(u,v,w)` lacking a twin. Multiplicities are
    /// matched so the edge multiset becomes symmetric; running it twice is a
    /// no-op.
    pub fn add_reverse_edges(mut self) -> Graph {
        let mut counts: HashMap<(NodeId, NodeId, Option<Weight>), isize> = HashMap::new();
        for e in &self.edges {
            *counts.entry((e.src, e.dst, e.weight)).or_default() += 1;
        }
        let mut added = Vec::new();
        let mut owed: HashMap<(NodeId, NodeId, Option<Weight>), isize> = HashMap::new();
        for e in &self.edges {
            let fwd = (e.src, e.dst, e.weight);
            let rev = (e.dst, e.src, e.weight);
            let missing = owed.entry(fwd).or_insert_with(|| {
                counts.get(&fwd).copied().unwrap_or(0) - counts.get(&rev).copied().unwrap_or(0)
            });
            if *missing > 0 {
                *missing -= 1;
                added.push(Edge {
                    src: e.dst,
                    dst: e.src,
                    weight: e.weight,
                    label: e.label.clone(),
                });
            }
        }
        self.edges.extend(added);
        self.rebuild();
        self
    }

    /// Degree-step edge lengths: `1 + floor(log10 d_in(target))` while
    /// `d_in < tau`; edges into nodes at or above `tau` are dropped.
    /// In-degrees are taken from the graph as given, so call this before
    /// [`Graph::add_reverse_edges`].
    pub fn assign_step_weights(mut self, policy: &WeightPolicy) -> Result<Graph> {
        policy.validate()?;
        if policy.mode == WeightMode::Precomputed {
            if let Some(e) = self.edges.iter().find(|e| e.weight.is_none()) {
                return Err(GraphError::Unweighted {
                    src: e.src,
                    dst: e.dst,
                });
            }
            self.rebuild();
            return Ok(self);
        }
        let d_in = self.in_degrees();
        self.edges.retain_mut(|e| match policy.step_weight(d_in[e.dst.index()]) {
            Some(w) => {
                e.weight = Some(w);
                true
            }
            None => false,
        });
        if self.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        self.rebuild();
        Ok(self)
    }

    /// Smallest edge length, cached at construction.
    pub fn min_edge_weight(&self) -> Result<Weight> {
        if self.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        if let Some(e) = self.edges.iter().find(|e| e.weight.is_none()) {
            return Err(GraphError::Unweighted {
                src: e.src,
                dst: e.dst,
            });
        }
        self.e_min.ok_or(GraphError::NoEdges)
    }

    pub fn build_inverted_index(&self) -> InvertedIndex {
        InvertedIndex::build(self)
    }
}
