use crate::graph::{Graph, NodeId};

/// Vertex placement: `id mod workers`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partitioning {
    pub workers: usize,
    /// Worker index per node id.
    pub owner: Vec<usize>,
    /// Node ids per worker, ascending.
    pub members: Vec<Vec<NodeId>>,
}

impl Partitioning {
    /// Worker and position within that worker's member list.
    #[inline]
    pub fn locate(&self, v: NodeId) -> (usize, usize) {
        let i = v.index();
        (i % self.workers, i / self.workers)
    }
}

/// Deterministic hash placement of every vertex onto `workers` workers.
/// `workers` must be at least 1.
pub fn partition(graph: &Graph, workers: usize) -> Partitioning {
    assert!(workers >= 1, "workers must be >= 1");
    let n = graph.node_count();
    let owner: Vec<usize> = (0..n).map(|i| i % workers).collect();
    let mut members = vec![Vec::with_capacity(n / workers + 1); workers];
    for (i, &w) in owner.iter().enumerate() {
        members[w].push(NodeId::from(i));
    }
    Partitioning {
        workers,
        owner,
        members,
    }
}
