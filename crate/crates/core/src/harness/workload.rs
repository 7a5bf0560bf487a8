//! Query workloads sampled from the vocabulary by posting-list size.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::graph::InvertedIndex;
use crate::search::{Query, DksError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    /// Queries per keyword count.
    pub per_count: usize,
    pub counts: Vec<usize>,
    pub seed: u64,
    /// Tokens with fewer keyword nodes are never used.
    pub min_postings: usize,
    /// Tokens with more keyword nodes are never used.
    pub max_postings: usize,
}

impl WorkloadSpec {
    pub fn new(per_count: usize, counts: Vec<usize>, seed: u64) -> Self {
        WorkloadSpec {
            per_count,
            counts,
            seed,
            min_postings: 1,
            max_postings: usize::MAX,
        }
    }
}

/// Keyword lists, grouped by keyword count in the order the counts were
/// requested. K is chosen per run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryWorkload {
    pub queries: Vec<Vec<String>>,
}

impl QueryWorkload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn with_k(&self, k: usize) -> Result<Vec<Query>, DksError> {
        self.queries.iter().map(|q| Query::new(q.clone(), k, q.len().max(1))).collect()
    }

    /// Every keyword must have a nonempty posting list.
    pub fn check(&self, index: &InvertedIndex) -> Result<(), HarnessError> {
        for q in &self.queries {
            if let Some(w) = q.iter().find(|w| index.postings(w).is_empty()) {
                return Err(DksError::KeywordNotFound(w.clone()).into());
            }
        }
        Ok(())
    }
}

/// One query per line, keywords separated by spaces; `#` starts a comment.
impl fmt::Display for QueryWorkload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.queries {
            writeln!(f, "{}", q.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for QueryWorkload {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let queries = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(str::to_lowercase).collect())
            .collect();
        Ok(QueryWorkload { queries })
    }
}

/// Buckets usable tokens by decade of posting-list size (1-9, 10-99, ...)
/// and draws each keyword from the buckets in turn, so keyword-node counts
/// range from a handful to thousands. Deterministic for a given seed.
pub fn generate_queries(index: &InvertedIndex, spec: &WorkloadSpec) -> Result<QueryWorkload, HarnessError> {
    let mut strata: Vec<Vec<&str>> = Vec::new();
    for (token, size) in index.frequencies() {
        if size < spec.min_postings.max(1) || size > spec.max_postings {
            continue;
        }
        let decade = size.ilog10() as usize;
        if strata.len() <= decade {
            strata.resize(decade + 1, Vec::new());
        }
        strata[decade].push(token);
    }
    strata.retain(|s| !s.is_empty());
    let vocabulary: usize = strata.iter().map(Vec::len).sum();
    let widest = spec.counts.iter().copied().max().unwrap_or(0);
    if widest > vocabulary {
        return Err(HarnessError::Vocabulary {
            needed: widest,
            available: vocabulary,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut queries = Vec::with_capacity(spec.per_count * spec.counts.len());
    let mut turn = 0usize;
    for &count in &spec.counts {
        for _ in 0..spec.per_count {
            let mut q: Vec<String> = Vec::with_capacity(count);
            while q.len() < count {
                let stratum = &strata[turn % strata.len()];
                turn += 1;
                let word = stratum.choose(&mut rng).expect("strata are nonempty");
                if !q.iter().any(|w| w == word) {
                    q.push(word.to_string());
                }
            }
            queries.push(q);
        }
    }
    Ok(QueryWorkload { queries })
}
