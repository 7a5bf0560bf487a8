pub mod graph;
pub mod bsp;
pub mod oracle;
pub mod search;
pub mod fixtures;
pub mod harness;
