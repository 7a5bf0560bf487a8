use std::collections::BTreeMap;

use super::{Graph, NodeId};

/// Lowercases and splits on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// token -> sorted, duplicate-free list of nodes whose text contains it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<NodeId>>,
}

impl InvertedIndex {
    pub fn build(graph: &Graph) -> Self {
        let mut postings: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
        // Nodes are visited in id order, so each list is built sorted.
        for node in graph.nodes() {
            for token in tokenize(&node.text) {
                let list = postings.entry(token).or_default();
                if list.last() != Some(&node.id) {
                    list.push(node.id);
                }
            }
        }
        InvertedIndex { postings }
    }

    pub fn postings(&self, token: &str) -> &[NodeId] {
        self.postings.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.postings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    /// All tokens with their posting-list sizes, in token order.
    pub fn frequencies(&self) -> impl Iterator<Item = (&str, usize)> {
        self.postings.iter().map(|(t, p)| (t.as_str(), p.len()))
    }
}
