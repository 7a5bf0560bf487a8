use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DksError, KeywordSetMask};
use crate::graph::{NodeId, Weight};

/// Undirected edge with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeEdge {
    pub lo: NodeId,
    pub hi: NodeId,
    pub weight: Weight,
}

impl TreeEdge {
    pub fn new(a: NodeId, b: NodeId, weight: Weight) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        TreeEdge { lo, hi, weight }
    }

    pub fn touches(&self, v: NodeId) -> bool {
        self.lo == v || self.hi == v
    }

    pub fn other(&self, v: NodeId) -> NodeId {
        if self.lo == v {
            self.hi
        } else {
            self.lo
        }
    }
}

/// A tree rooted at `root` that covers the keywords of `mask`. Every
/// non-root leaf is one of the assigned keyword nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialAnswer {
    pub root: NodeId,
    pub mask: KeywordSetMask,
    /// Sorted.
    pub edges: Vec<TreeEdge>,
    /// Sorted; includes `root`.
    pub nodes: Vec<NodeId>,
    /// Sum of the weights in `edges`.
    pub path_length: Weight,
    /// `(keyword index, node)` for every bit of `mask`, ascending by keyword.
    pub keyword_nodes: Vec<(u8, NodeId)>,
}

impl PartialAnswer {
    /// Zero-length entry of a keyword node for one of its own keywords.
    pub fn seed(v: NodeId, keyword: usize) -> Self {
        PartialAnswer {
            root: v,
            mask: KeywordSetMask::single(keyword),
            edges: Vec::new(),
            nodes: vec![v],
            path_length: 0,
            keyword_nodes: vec![(keyword as u8, v)],
        }
    }

    /// Table order: `(path_length, edges, nodes, keyword assignment)`.
    pub fn table_cmp(&self, other: &Self) -> Ordering {
        self.path_length
            .cmp(&other.path_length)
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.keyword_nodes.cmp(&other.keyword_nodes))
    }

    /// Same underlying tree, ignoring root and keyword assignment.
    pub fn same_tree(&self, other: &Self) -> bool {
        self.edges == other.edges && self.nodes == other.nodes
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// The entry as seen from neighbour `to` across an edge of weight `w`.
    ///
    /// If `to` is outside the tree the edge is added. Otherwise the tree is
    /// re-rooted at `to` and trimmed to the part spanning `to` and the
    /// assigned keyword nodes, so it never grows.
    pub fn shift(&self, to: NodeId, w: Weight) -> PartialAnswer {
        if !self.contains(to) {
            let edge = TreeEdge::new(self.root, to, w);
            let mut edges = self.edges.clone();
            let at = edges.binary_search(&edge).unwrap_err();
            edges.insert(at, edge);
            let mut nodes = self.nodes.clone();
            let at = nodes.binary_search(&to).unwrap_err();
            nodes.insert(at, to);
            return PartialAnswer {
                root: to,
                mask: self.mask,
                edges,
                nodes,
                path_length: self.path_length + w,
                keyword_nodes: self.keyword_nodes.clone(),
            };
        }
        let keep = |v: NodeId| v == to || self.keyword_nodes.iter().any(|&(_, k)| k == v);
        let (edges, nodes) = trim_leaves(&self.edges, &self.nodes, keep);
        PartialAnswer {
            root: to,
            mask: self.mask,
            path_length: edges.iter().map(|e| e.weight).sum(),
            edges,
            nodes,
            keyword_nodes: self.keyword_nodes.clone(),
        }
    }

    /// Union of two entries at the same root covering disjoint masks. `None`
    /// when the union is not a tree. Shared edges are counted once.
    pub fn combine(&self, other: &PartialAnswer) -> Option<PartialAnswer> {
        debug_assert_eq!(self.root, other.root);
        if !self.mask.is_disjoint(other.mask) {
            return None;
        }
        let edges = sorted_union(&self.edges, &other.edges);
        let nodes = sorted_union(&self.nodes, &other.nodes);
        if edges.len() + 1 != nodes.len() {
            return None;
        }
        let mut keyword_nodes = self.keyword_nodes.clone();
        keyword_nodes.extend_from_slice(&other.keyword_nodes);
        keyword_nodes.sort_unstable();
        Some(PartialAnswer {
            root: self.root,
            mask: self.mask.union(other.mask),
            path_length: edges.iter().map(|e| e.weight).sum(),
            edges,
            nodes,
            keyword_nodes,
        })
    }

    /// Every leaf, the root included, is the only node of the tree holding
    /// one of the first `m` keywords.
    pub fn is_minimal(&self, node_masks: &[u32], m: usize) -> bool {
        leaves_essential(&self.edges, &self.nodes, node_masks, m)
    }

    /// Structural invariants; used by tests and debug assertions.
    pub fn is_well_formed(&self) -> bool {
        let sorted = self.edges.windows(2).all(|w| w[0] < w[1])
            && self.nodes.windows(2).all(|w| w[0] < w[1]);
        let sum: Weight = self.edges.iter().map(|e| e.weight).sum();
        let assigned = self.keyword_nodes.len() == self.mask.len()
            && self
                .keyword_nodes
                .iter()
                .all(|&(k, v)| self.mask.contains(k as usize) && self.contains(v));
        sorted
            && sum == self.path_length
            && self.contains(self.root)
            && assigned
            && self.edges.len() + 1 == self.nodes.len()
            && is_connected(&self.edges, &self.nodes)
    }
}

fn sorted_union<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn degrees(edges: &[TreeEdge], nodes: &[NodeId]) -> Vec<usize> {
    let mut deg = vec![0usize; nodes.len()];
    for e in edges {
        for v in [e.lo, e.hi] {
            if let Ok(i) = nodes.binary_search(&v) {
                deg[i] += 1;
            }
        }
    }
    deg
}

fn is_connected(edges: &[TreeEdge], nodes: &[NodeId]) -> bool {
    if nodes.is_empty() {
        return false;
    }
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        let v = nodes[i];
        for e in edges.iter().filter(|e| e.touches(v)) {
            let Ok(j) = nodes.binary_search(&e.other(v)) else {
                return false;
            };
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Repeatedly drops leaves for which `keep` is false. The result is the
/// unique subtree spanning the kept nodes.
fn trim_leaves(
    edges: &[TreeEdge],
    nodes: &[NodeId],
    keep: impl Fn(NodeId) -> bool,
) -> (Vec<TreeEdge>, Vec<NodeId>) {
    let mut edges = edges.to_vec();
    let mut nodes = nodes.to_vec();
    loop {
        if nodes.len() <= 1 {
            return (edges, nodes);
        }
        let deg = degrees(&edges, &nodes);
        let drop: Vec<NodeId> = nodes
            .iter()
            .zip(&deg)
            .filter(|&(&v, &d)| d <= 1 && !keep(v))
            .map(|(&v, _)| v)
            .collect();
        if drop.is_empty() {
            return (edges, nodes);
        }
        edges.retain(|e| !drop.iter().any(|&v| e.touches(v)));
        nodes.retain(|v| !drop.contains(v));
    }
}

/// A minimal answer tree: every leaf is the only node in the tree holding
/// some query keyword.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerTree {
    pub root: NodeId,
    /// Sorted.
    pub edges: Vec<TreeEdge>,
    /// Sorted.
    pub nodes: Vec<NodeId>,
    pub weight: Weight,
    /// Smallest node id in the tree holding each keyword, by keyword index.
    pub keyword_nodes: Vec<NodeId>,
    /// Keyword mask and weight of the subtree under each child of the
    /// root (including the connecting edge), ascending by mask.
    pub constituents: Vec<(KeywordSetMask, Weight)>,
}

impl AnswerTree {
    /// Prunes a full-mask entry to a minimal tree. Leaves are removed
    /// smallest id first while coverage of all `m` keywords survives; if the
    /// root itself goes, its neighbour takes over.
    pub fn from_entry(entry: &PartialAnswer, node_masks: &[u32], m: usize) -> Result<AnswerTree, DksError> {
        Self::from_tree(entry.root, &entry.edges, &entry.nodes, node_masks, m)
    }

    pub fn from_tree(
        root: NodeId,
        edges: &[TreeEdge],
        nodes: &[NodeId],
        node_masks: &[u32],
        m: usize,
    ) -> Result<AnswerTree, DksError> {
        let full = KeywordSetMask::full(m).bits();
        let mut root = root;
        let mut edges = edges.to_vec();
        let mut nodes = nodes.to_vec();
        let mut holders = vec![0usize; m];
        for v in &nodes {
            for (k, h) in holders.iter_mut().enumerate() {
                if node_masks[v.index()] & (1 << k) != 0 {
                    *h += 1;
                }
            }
        }
        if holders.iter().any(|&h| h == 0) {
            return Err(DksError::Uncovered);
        }
        while nodes.len() > 1 {
            let deg = degrees(&edges, &nodes);
            let removable = nodes.iter().zip(&deg).find_map(|(&v, &d)| {
                let mask = node_masks[v.index()] & full;
                let spare = (0..m).all(|k| mask & (1 << k) == 0 || holders[k] >= 2);
                (d == 1 && spare).then_some(v)
            });
            let Some(leaf) = removable else { break };
            let at = edges.iter().position(|e| e.touches(leaf)).expect("leaf has an edge");
            let edge = edges.remove(at);
            nodes.retain(|&v| v != leaf);
            for (k, h) in holders.iter_mut().enumerate() {
                if node_masks[leaf.index()] & (1 << k) != 0 {
                    *h -= 1;
                }
            }
            if leaf == root {
                root = edge.other(leaf);
            }
        }
        let keyword_nodes = (0..m)
            .map(|k| {
                *nodes
                    .iter()
                    .find(|v| node_masks[v.index()] & (1 << k) != 0)
                    .expect("coverage kept")
            })
            .collect();
        let constituents = decompose(root, &edges, node_masks, full)?;
        Ok(AnswerTree {
            root,
            weight: edges.iter().map(|e| e.weight).sum(),
            edges,
            nodes,
            keyword_nodes,
            constituents,
        })
    }

    /// Sorted `(lo, hi, weight)` triples; a single node `v` is `[(v, v, 0)]`.
    pub fn canonical_key(&self) -> Vec<(u32, u32, Weight)> {
        if self.edges.is_empty() {
            return vec![(self.root.0, self.root.0, 0)];
        }
        self.edges.iter().map(|e| (e.lo.0, e.hi.0, e.weight)).collect()
    }

    /// Ranking order: `(weight, canonical key, root)`.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| self.canonical_key().cmp(&other.canonical_key()))
            .then_with(|| self.root.cmp(&other.root))
    }

    pub fn edge_sum(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Every leaf is the sole holder of some keyword.
    pub fn is_minimal(&self, node_masks: &[u32], m: usize) -> bool {
        leaves_essential(&self.edges, &self.nodes, node_masks, m)
    }
}

fn leaves_essential(edges: &[TreeEdge], nodes: &[NodeId], node_masks: &[u32], m: usize) -> bool {
    if nodes.len() == 1 {
        return true;
    }
    let deg = degrees(edges, nodes);
    nodes.iter().zip(&deg).filter(|&(_, &d)| d == 1).all(|(&leaf, _)| {
        (0..m).any(|k| {
            node_masks[leaf.index()] & (1 << k) != 0
                && nodes
                    .iter()
                    .filter(|v| node_masks[v.index()] & (1 << k) != 0)
                    .count()
                    == 1
        })
    })
}

/// Splits the tree at its root into child subtrees and returns the keyword
/// mask and weight of each (the connecting edge included).
fn decompose(
    root: NodeId,
    edges: &[TreeEdge],
    node_masks: &[u32],
    full: u32,
) -> Result<Vec<(KeywordSetMask, Weight)>, DksError> {
    let mut out: BTreeMap<KeywordSetMask, Weight> = BTreeMap::new();
    for first in edges.iter().filter(|e| e.touches(root)) {
        let child = first.other(root);
        let mut mask = 0u32;
        let mut weight = first.weight;
        let mut stack = vec![(child, root)];
        while let Some((v, parent)) = stack.pop() {
            mask |= node_masks[v.index()] & full;
            for e in edges.iter().filter(|e| e.touches(v)) {
                let next = e.other(v);
                if next != parent {
                    weight += e.weight;
                    stack.push((next, v));
                }
            }
        }
        let mask = KeywordSetMask(mask);
        if mask.is_empty() || out.insert(mask, weight).is_some() {
            return Err(DksError::ConstituentClash { mask });
        }
    }
    Ok(out.into_iter().collect())
}

/// Answer weight as the sum of constituent path-lengths, checked against
/// the plain edge sum.
pub fn answer_weight_eq3(answer: &AnswerTree) -> Result<Weight, DksError> {
    let by_constituents: Weight = answer.constituents.iter().map(|&(_, w)| w).sum();
    let by_edges = answer.edge_sum();
    if by_constituents != by_edges || by_edges != answer.weight {
        return Err(DksError::WeightMismatch {
            constituents: by_constituents,
            edges: by_edges,
        });
    }
    Ok(by_constituents)
}
