//! Tiny hand-checkable graphs used by the examples, tests and `dks run --fixture`.
//!
//! All graphs are returned with reverse edges already added.

use crate::graph::{Graph, Weight};

/// Path v1-v2-v3-v4 with unit weights; "alpha" on v1, "delta" on v4.
/// Best answer for "alpha delta" is the whole path, weight 3.
pub fn path4() -> Graph {
    Graph::from_weighted_edges(&["alpha", "", "", "delta"], &[(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        .add_reverse_edges()
}

/// Center 0 with three unit spokes; "alpha" on leaf 1, "bravo" on leaf 2.
/// Best answer for "alpha bravo" is the two spokes through the center, weight 2.
pub fn star3() -> Graph {
    Graph::from_weighted_edges(
        &["hub", "alpha", "bravo", "charlie"],
        &[(0, 1, 1), (0, 2, 1), (0, 3, 1)],
    )
    .add_reverse_edges()
}

/// Star with `leaves` unit spokes and no keywords. Floods cheaply.
pub fn star(leaves: u32) -> Graph {
    let texts: Vec<String> = (0..=leaves).map(|i| if i == 0 { "hub".into() } else { format!("leaf{i}") }).collect();
    let edges: Vec<(u32, u32, Weight)> = (1..=leaves).map(|l| (0, l, 1)).collect();
    Graph::from_weighted_edges(&texts, &edges).add_reverse_edges()
}

/// An unbalanced answer that forward traversal alone cannot assemble.
///
/// ```text
///   2 --1-- 1 --4-- 0 --2-- 3 --1-- 6
///           |       |
///           5       4
/// ```
///
/// "alpha" on 2, "bravo" on 0 and 1, "charlie" on 6. Nodes 0 and 1 message
/// each other in the first superstep, so neither forwards across 0-1 again:
/// the alpha side and the charlie side only meet through deep messages. The
/// only answer for "alpha bravo charlie" is the path 2-1-0-3-6, weight 8.
pub fn unbalanced() -> Graph {
    Graph::from_weighted_edges(
        &["bravo", "bravo", "alpha", "", "", "", "charlie"],
        &[(0, 1, 4), (1, 2, 1), (0, 3, 2), (0, 4, 1), (1, 5, 2), (3, 6, 1)],
    )
    .add_reverse_edges()
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<Graph> {
    match name {
        "path4" => Some(path4()),
        "star3" => Some(star3()),
        "unbalanced" => Some(unbalanced()),
        _ => None,
    }
}

pub const NAMES: [&str; 3] = ["path4", "star3", "unbalanced"];
