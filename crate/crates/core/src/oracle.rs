//! Brute-force reference solutions for small group Steiner tree instances.
//!
//! Nothing here shares code with the vertex program: the graph is read as an
//! undirected edge list, optima come from a (vertex, group-mask) dynamic
//! program and top-K lists from explicit subtree enumeration.

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, NodeId, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("group {group} names node {node} which is not in the graph")]
    UnknownNode { group: usize, node: NodeId },
    #[error("too many groups: {0}")]
    TooManyGroups(usize),
    #[error("graph too large for enumeration: {0} nodes")]
    TooLarge(usize),
}

/// A graph plus the node groups T1..Tm to connect.
#[derive(Clone, Debug)]
pub struct GstInstance<'g> {
    pub graph: &'g Graph,
    pub groups: Vec<Vec<NodeId>>,
}

pub const MAX_DP_GROUPS: usize = 12;
pub const MAX_ENUM_NODES: usize = 14;
pub const MAX_COVER_KEYWORDS: usize = 4;

impl<'g> GstInstance<'g> {
    pub fn new(graph: &'g Graph, groups: Vec<Vec<NodeId>>) -> Result<Self, OracleError> {
        if groups.len() > MAX_DP_GROUPS {
            return Err(OracleError::TooManyGroups(groups.len()));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(OracleError::EmptyGroup(i));
            }
            if let Some(&node) = g.iter().find(|v| v.index() >= graph.node_count()) {
                return Err(OracleError::UnknownNode { group: i, node });
            }
        }
        Ok(GstInstance { graph, groups })
    }

    fn full(&self) -> u32 {
        (1u32 << self.groups.len()) - 1
    }

    fn node_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.graph.node_count()];
        for (i, g) in self.groups.iter().enumerate() {
            for v in g {
                masks[v.index()] |= 1 << i;
            }
        }
        masks
    }

    /// Undirected adjacency, lightest edge per pair.
    fn undirected(&self) -> Vec<Vec<(usize, Weight)>> {
        let n = self.graph.node_count();
        let mut best: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
        for e in self.graph.edges() {
            let Some(w) = e.weight else { continue };
            let (a, b) = (e.src.index(), e.dst.index());
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            let slot = best.entry(key).or_insert(w);
            *slot = (*slot).min(w);
        }
        let mut adj = vec![Vec::new(); n];
        for (&(a, b), &w) in &best {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        adj
    }
}

/// Exact minimum group Steiner tree weight, or `None` when no tree touches
/// every group.
pub fn gst_optimal_dp(inst: &GstInstance<'_>) -> Option<Weight> {
    const INF: Weight = Weight::MAX;
    let n = inst.graph.node_count();
    let full = inst.full();
    let adj = inst.undirected();
    let node_masks = inst.node_masks();
    let mut dp = vec![vec![INF; n]; full as usize + 1];
    for (v, &m) in node_masks.iter().enumerate() {
        let mut sub = m;
        while sub != 0 {
            dp[sub as usize][v] = 0;
            sub = (sub - 1) & m;
        }
    }
    for mask in 1..=full {
        let mi = mask as usize;
        // merge two disjoint halves at the same vertex
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            while sub != 0 {
                let rest = mask ^ sub;
                if sub < rest {
                    let (a, b) = (dp[sub as usize][v], dp[rest as usize][v]);
                    if a != INF && b != INF && a + b < dp[mi][v] {
                        dp[mi][v] = a + b;
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        // grow along edges
        let mut heap: BinaryHeap<Reverse<(Weight, usize)>> = (0..n)
            .filter(|&v| dp[mi][v] != INF)
            .map(|v| Reverse((dp[mi][v], v)))
            .collect();
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dp[mi][v] {
                continue;
            }
            for &(u, w) in &adj[v] {
                if d + w < dp[mi][u] {
                    dp[mi][u] = d + w;
                    heap.push(Reverse((d + w, u)));
                }
            }
        }
    }
    dp[full as usize].iter().copied().filter(|&d| d != INF).min()
}

/// One minimal answer tree found by enumeration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OracleAnswer {
    pub weight: Weight,
    /// Sorted `(lo, hi, weight)` edges; a single node `v` is `[(v, v, 0)]`.
    pub key: Vec<(u32, u32, Weight)>,
    pub nodes: Vec<NodeId>,
}

impl OracleAnswer {
    pub fn edge_count(&self) -> usize {
        self.key.iter().filter(|e| e.0 != e.1).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleTopK {
    pub answers: Vec<OracleAnswer>,
    /// False when the graph holds fewer than K minimal answer trees.
    pub complete: bool,
}

impl OracleTopK {
    pub fn weights(&self) -> Vec<Weight> {
        self.answers.iter().map(|a| a.weight).collect()
    }
}

/// The K lightest minimal answer trees, ordered by (weight, canonical key).
pub fn enumerate_minimal_answer_trees(
    inst: &GstInstance<'_>,
    k: usize,
) -> Result<OracleTopK, OracleError> {
    let n = inst.graph.node_count();
    if n > MAX_ENUM_NODES {
        return Err(OracleError::TooLarge(n));
    }
    let Some(opt) = gst_optimal_dp(inst) else {
        return Ok(OracleTopK {
            answers: Vec::new(),
            complete: k == 0,
        });
    };
    let adj = inst.undirected();
    let total: Weight = adj.iter().flatten().map(|&(_, w)| w).sum::<Weight>() / 2;
    let node_masks = inst.node_masks();
    let full = inst.full();
    let mut bound = opt;
    loop {
        let mut found = Vec::new();
        for r in 0..n {
            let mut walker = SubtreeWalker {
                adj: &adj,
                node_masks: &node_masks,
                full,
                bound,
                root: r,
                in_tree: 1u64 << r,
                edges: Vec::new(),
                found: &mut found,
            };
            let cands = walker.fresh_candidates(r);
            walker.visit(0, cands);
        }
        found.sort();
        found.dedup_by(|a, b| a.key == b.key);
        if found.len() >= k || bound >= total {
            let complete = found.len() >= k;
            found.truncate(k);
            return Ok(OracleTopK {
                answers: found,
                complete,
            });
        }
        bound += 1;
    }
}

struct SubtreeWalker<'a> {
    adj: &'a [Vec<(usize, Weight)>],
    node_masks: &'a [u32],
    full: u32,
    bound: Weight,
    root: usize,
    in_tree: u64,
    edges: Vec<(usize, usize, Weight)>,
    found: &'a mut Vec<OracleAnswer>,
}

impl SubtreeWalker<'_> {
    /// Edges from `v` to vertices above the root that are not in the tree.
    fn fresh_candidates(&self, v: usize) -> Vec<(usize, usize, Weight)> {
        self.adj[v]
            .iter()
            .filter(|&&(u, _)| u > self.root && self.in_tree & (1 << u) == 0)
            .map(|&(u, w)| (v, u, w))
            .collect()
    }

    fn visit(&mut self, weight: Weight, cands: Vec<(usize, usize, Weight)>) {
        self.report(weight);
        for i in 0..cands.len() {
            let (x, y, w) = cands[i];
            if weight + w > self.bound {
                continue;
            }
            self.in_tree |= 1 << y;
            self.edges.push((x, y, w));
            let mut next: Vec<_> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&(_, t, _)| t != y)
                .collect();
            next.extend(self.fresh_candidates(y));
            self.visit(weight + w, next);
            self.edges.pop();
            self.in_tree &= !(1 << y);
        }
    }

    fn report(&mut self, weight: Weight) {
        let nodes: Vec<usize> = (0..self.adj.len())
            .filter(|&v| self.in_tree & (1 << v) != 0)
            .collect();
        let cover = nodes.iter().fold(0, |acc, &v| acc | self.node_masks[v]);
        if cover != self.full {
            return;
        }
        let mut degree = vec![0usize; self.adj.len()];
        for &(a, b, _) in &self.edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        for &leaf in nodes.iter().filter(|&&v| degree[v] == 1) {
            let without = nodes
                .iter()
                .filter(|&&v| v != leaf)
                .fold(0, |acc, &v| acc | self.node_masks[v]);
            if without == self.full {
                return;
            }
        }
        let mut key: Vec<(u32, u32, Weight)> = self
            .edges
            .iter()
            .map(|&(a, b, w)| (a.min(b) as u32, a.max(b) as u32, w))
            .collect();
        if key.is_empty() {
            key.push((self.root as u32, self.root as u32, 0));
        }
        key.sort_unstable();
        self.found.push(OracleAnswer {
            weight,
            key,
            nodes: nodes.into_iter().map(NodeId::from).collect(),
        });
    }
}

/// Exhaustive set-cover over every subset of the available keyword masks.
/// `estimates[mask]` is the per-mask lower bound (index 0 unused).
pub fn spa_cover_oracle(estimates: &[Option<Weight>], m: usize) -> Result<Option<Weight>, OracleError> {
    if m > MAX_COVER_KEYWORDS {
        return Err(OracleError::TooManyGroups(m));
    }
    let full = (1u32 << m) - 1;
    let available: Vec<(u32, Weight)> = (1..=full)
        .filter_map(|mask| estimates.get(mask as usize).copied().flatten().map(|w| (mask, w)))
        .collect();
    let mut best: Option<Weight> = None;
    for subset in 1u64..(1u64 << available.len()) {
        let mut cover = 0u32;
        let mut total: Weight = 0;
        for (i, &(mask, w)) in available.iter().enumerate() {
            if subset & (1 << i) != 0 {
                cover |= mask;
                total += w;
            }
        }
        if cover == full && best.map_or(true, |b| total < b) {
            best = Some(total);
        }
    }
    Ok(best)
}
