use std::fmt;

use serde::{Deserialize, Serialize};

use super::DksError;
use crate::graph::{tokenize, InvertedIndex, NodeId};

/// Default cap on keywords per query.
pub const DEFAULT_MAX_KEYWORDS: usize = 6;
/// Hard cap: masks are `u32` and tables hold `2^m` lists.
pub const MAX_KEYWORDS: usize = 16;

/// A non-empty subset of the query keywords, bit `i` standing for keyword `i`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct KeywordSetMask(pub u32);

impl KeywordSetMask {
    pub fn full(m: usize) -> Self {
        KeywordSetMask(((1u64 << m) - 1) as u32)
    }

    pub fn single(keyword: usize) -> Self {
        KeywordSetMask(1 << keyword)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        KeywordSetMask(self.0 | other.0)
    }

    pub fn contains(self, keyword: usize) -> bool {
        self.0 & (1 << keyword) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn keywords(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// Every non-empty submask, in decreasing numeric order.
    pub fn submasks(self) -> impl Iterator<Item = KeywordSetMask> {
        let m = self.0;
        let mut sub = m;
        std::iter::from_fn(move || {
            if sub == 0 {
                return None;
            }
            let out = sub;
            sub = (sub - 1) & m;
            Some(KeywordSetMask(out))
        })
    }

    /// Every non-empty mask for `m` keywords, ascending.
    pub fn all(m: usize) -> impl Iterator<Item = KeywordSetMask> {
        (1..=Self::full(m).0).map(KeywordSetMask)
    }
}

impl fmt::Display for KeywordSetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.keywords().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "q{}", k + 1)?;
        }
        write!(f, "}}")
    }
}

/// Keywords q1..qm and the number of answers wanted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub keywords: Vec<String>,
    pub k: usize,
}

impl Query {
    /// Tokenizes `text` the same way node text is indexed; repeated tokens
    /// collapse to their first occurrence.
    pub fn parse(text: &str, k: usize) -> Result<Query, DksError> {
        Self::parse_with_cap(text, k, DEFAULT_MAX_KEYWORDS)
    }

    pub fn parse_with_cap(text: &str, k: usize, max_keywords: usize) -> Result<Query, DksError> {
        let mut keywords: Vec<String> = Vec::new();
        for t in tokenize(text) {
            if !keywords.contains(&t) {
                keywords.push(t);
            }
        }
        Query::new(keywords, k, max_keywords)
    }

    pub fn new(keywords: Vec<String>, k: usize, max_keywords: usize) -> Result<Query, DksError> {
        if keywords.is_empty() {
            return Err(DksError::EmptyQuery);
        }
        if k == 0 {
            return Err(DksError::ZeroK);
        }
        let cap = max_keywords.min(MAX_KEYWORDS);
        if keywords.len() > cap {
            return Err(DksError::TooManyKeywords {
                got: keywords.len(),
                cap,
            });
        }
        for (i, kw) in keywords.iter().enumerate() {
            if keywords[..i].contains(kw) {
                return Err(DksError::DuplicateKeyword(kw.clone()));
            }
        }
        Ok(Query { keywords, k })
    }

    pub fn m(&self) -> usize {
        self.keywords.len()
    }

    pub fn full_mask(&self) -> KeywordSetMask {
        KeywordSetMask::full(self.m())
    }

    pub fn text(&self) -> String {
        self.keywords.join(" ")
    }
}

/// Keyword-node groups T1..Tm, one per query keyword.
pub fn resolve_keyword_nodes(query: &Query, index: &InvertedIndex) -> Result<Vec<Vec<NodeId>>, DksError> {
    query
        .keywords
        .iter()
        .map(|kw| {
            let postings = index.postings(kw);
            if postings.is_empty() {
                Err(DksError::KeywordNotFound(kw.clone()))
            } else {
                Ok(postings.to_vec())
            }
        })
        .collect()
}

/// Per-node keyword mask for the resolved groups.
pub fn node_keyword_masks(groups: &[Vec<NodeId>], node_count: usize) -> Vec<u32> {
    let mut masks = vec![0u32; node_count];
    for (i, g) in groups.iter().enumerate() {
        for v in g {
            masks[v.index()] |= 1 << i;
        }
    }
    masks
}
