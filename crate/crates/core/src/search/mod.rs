//! Distributed top-K keyword search as a vertex program.
//!
//! Keyword nodes seed zero-length partial answers; every superstep each
//! reached vertex merges what its neighbours sent, keeps the K best partial
//! answers per keyword-set, reports complete answers and per-set minima to
//! the master, and forwards whatever is new. Entries go forward (BFS) to
//! neighbours that have not messaged the vertex and backward (deep) to those
//! that have. The master keeps the global top-K and raises a stop flag once
//! no frontier estimate can beat it; deep traffic then drains.

mod aggregate;
pub mod exit;
mod program;
mod query;
mod runner;
mod table;
mod tree;

use thiserror::Error;

use crate::bsp::EngineError;
use crate::graph::{NodeId, Weight};

pub use aggregate::{AAState, ASState, Counters, DksAggregator, DksContribution, PhaseTimes, VertexSample};
pub use exit::{candidate_nodes, check_exit, estimate_spa, spa_ratio, tree_evaluation_count, ComplexityParams};
pub use program::{
    BfsMessage, DeepMessage, DksGlobal, DksMessage, DksProgram, DksVertex, SearchSettings, SuperstepTrace,
};
pub use query::{
    node_keyword_masks, resolve_keyword_nodes, KeywordSetMask, Query, DEFAULT_MAX_KEYWORDS, MAX_KEYWORDS,
};
pub use runner::{
    run_query, run_with_groups, AnswerOutput, AnswerRecord, DksConfig, DksHalt, DksOutcome, EdgeRecord,
    MetricsLine,
};
pub use table::{Insert, SkVkTable, Slot};
pub use tree::{answer_weight_eq3, AnswerTree, PartialAnswer, TreeEdge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DksError {
    #[error("query has no keywords")]
    EmptyQuery,
    #[error("K must be >= 1")]
    ZeroK,
    #[error("query has {got} keywords, at most {cap} allowed")]
    TooManyKeywords { got: usize, cap: usize },
    #[error("keyword repeated: {0}")]
    DuplicateKeyword(String),
    #[error("keyword not found: {0}")]
    KeywordNotFound(String),
    #[error("{groups} keyword groups for {keywords} keywords")]
    GroupCount { groups: usize, keywords: usize },
    #[error("tree does not cover every keyword")]
    Uncovered,
    #[error("answer root has two child subtrees with keyword set {mask}")]
    ConstituentClash { mask: KeywordSetMask },
    #[error("constituent weights sum to {constituents}, edges to {edges}")]
    WeightMismatch { constituents: Weight, edges: Weight },
    #[error("smallest possible answer weight is 0 but best found is {best}")]
    ZeroSpa { best: Weight },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("edge {src}->{dst} has no reverse of equal weight")]
    Asymmetric { src: NodeId, dst: NodeId },
    #[error("{0}")]
    Bookkeeping(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
