//! Termination tests and bounds evaluated by the master between supersteps.
//!
//! Per-mask vectors are indexed by mask bits and have length `2^m`; slot 0
//! is unused.

use serde::{Deserialize, Serialize};

use super::DksError;
use crate::graph::{NodeId, Weight};

/// True when every mask present in `s_n` satisfies `s + e_min > l`. Masks
/// with no `l` (not a constituent of any current top-K answer) block the
/// exit.
pub fn check_exit(s_n: &[Option<Weight>], l_n: &[Option<Weight>], e_min: Weight) -> bool {
    s_n.iter().enumerate().skip(1).all(|(mask, s)| match (s, l_n.get(mask).copied().flatten()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(s), Some(l)) => s.saturating_add(e_min) > l,
    })
}

/// Whether a vertex with these per-mask minima may still improve the top-K:
/// some estimate `s + e_min` does not exceed the matching `l`. Exactly the
/// negation of [`check_exit`] restricted to one vertex.
pub fn is_candidate(minima: &[(u32, Weight)], l_n: &[Option<Weight>], e_min: Weight) -> bool {
    minima.iter().any(|&(mask, s)| match l_n.get(mask as usize).copied().flatten() {
        None => true,
        Some(l) => s.saturating_add(e_min) <= l,
    })
}

/// Vertices passing [`is_candidate`], ascending.
pub fn candidate_nodes(
    per_vertex: &[(NodeId, Vec<(u32, Weight)>)],
    l_n: &[Option<Weight>],
    e_min: Weight,
) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = per_vertex
        .iter()
        .filter(|(_, minima)| is_candidate(minima, l_n, e_min))
        .map(|(v, _)| *v)
        .collect();
    out.sort_unstable();
    out
}

/// Set-cover lower bound on the weight of any answer not yet found, from
/// per-mask estimates `ŝ`. `None` when some keyword is covered by no
/// available mask.
pub fn estimate_spa(estimates: &[Option<Weight>], m: usize) -> Option<Weight> {
    let full = (1usize << m) - 1;
    let available: Vec<(usize, Weight)> = estimates
        .iter()
        .enumerate()
        .skip(1)
        .take(full)
        .filter_map(|(mask, s)| s.map(|s| (mask, s)))
        .collect();
    let mut cost: Vec<Option<Weight>> = vec![None; full + 1];
    cost[0] = Some(0);
    for u in 1..=full {
        cost[u] = available
            .iter()
            .filter(|&&(mask, _)| mask & u != 0)
            .filter_map(|&(mask, s)| cost[u & !mask].map(|c| c.saturating_add(s)))
            .min();
    }
    cost[full]
}

/// Estimates `ŝ = s + e_min` for the next superstep.
pub fn next_estimates(s_n: &[Option<Weight>], e_min: Weight) -> Vec<Option<Weight>> {
    s_n.iter().map(|s| s.map(|s| s.saturating_add(e_min))).collect()
}

/// 0 when the run ended on the exit criterion, otherwise `best / spa`.
pub fn spa_ratio(best_found: Weight, spa: Weight, exited: bool) -> Result<f64, DksError> {
    if exited {
        return Ok(0.0);
    }
    if spa == 0 {
        if best_found == 0 {
            return Ok(1.0);
        }
        return Err(DksError::ZeroSpa { best: best_found });
    }
    Ok(best_found as f64 / spa as f64)
}

/// Work model of one merge. Instrumentation only.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    /// Average keyword nodes per keyword in a local tree.
    pub p: f64,
    /// Average keyword-set size.
    pub r: f64,
    /// Average branching of emitted answers.
    pub c: f64,
    /// Average height of emitted answers.
    pub h: f64,
    pub avg_degree: f64,
    pub messages_per_vertex: f64,
}

/// `Σ_{r=0..m} C(m,r)·p^r`, the number of trees a vertex holding `p`
/// candidates per keyword could form; checked against `(1+p)^m`.
pub fn tree_evaluation_count(p: u64, m: u32) -> Result<u128, DksError> {
    let p = p as u128;
    let mut sum: u128 = 0;
    let mut binom: u128 = 1;
    let mut power: u128 = 1;
    for r in 0..=m {
        let term = binom.checked_mul(power).ok_or(DksError::Overflow)?;
        sum = sum.checked_add(term).ok_or(DksError::Overflow)?;
        if r < m {
            binom = binom * (m - r) as u128 / (r + 1) as u128;
            power = power.checked_mul(p).ok_or(DksError::Overflow)?;
        }
    }
    let closed = (1 + p).checked_pow(m).ok_or(DksError::Overflow)?;
    if closed != sum {
        return Err(DksError::Overflow);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(usize, Weight)], len: usize) -> Vec<Option<Weight>> {
        let mut out = vec![None; len];
        for &(i, w) in xs {
            out[i] = Some(w);
        }
        out
    }

    #[test]
    fn exit_fires_when_all_estimates_exceed() {
        let s = v(&[(1, 5), (2, 5)], 4);
        let l = v(&[(1, 3), (2, 3)], 4);
        assert!(check_exit(&s, &l, 1));
        let s = v(&[(1, 2), (2, 5)], 4);
        let l = v(&[(1, 9), (2, 3)], 4);
        assert!(!check_exit(&s, &l, 1));
        // mask 3 present with no l
        let s = v(&[(1, 5), (3, 8)], 4);
        assert!(!check_exit(&s, &v(&[(1, 3)], 4), 1));
        // equality is not enough
        assert!(!check_exit(&v(&[(1, 2)], 4), &v(&[(1, 3)], 4), 1));
    }

    #[test]
    fn candidates_empty_iff_exit() {
        let l = v(&[(1, 3), (2, 3)], 4);
        let far = vec![(NodeId(0), vec![(1, 5)]), (NodeId(1), vec![(2, 4)])];
        assert!(candidate_nodes(&far, &l, 1).is_empty());
        let s = v(&[(1, 5), (2, 4)], 4);
        assert!(check_exit(&s, &l, 1));
        let near = vec![(NodeId(3), vec![(1, 2)]), (NodeId(1), vec![(2, 4)])];
        assert_eq!(candidate_nodes(&near, &l, 1), vec![NodeId(3)]);
    }

    #[test]
    fn spa_cover() {
        assert_eq!(estimate_spa(&v(&[(1, 3), (2, 4), (3, 6)], 4), 2), Some(6));
        assert_eq!(estimate_spa(&v(&[(1, 3), (2, 4), (3, 9)], 4), 2), Some(7));
        assert_eq!(estimate_spa(&v(&[(1, 7)], 2), 1), Some(7));
        assert_eq!(estimate_spa(&v(&[(1, 3)], 4), 2), None);
    }

    #[test]
    fn ratio() {
        assert_eq!(spa_ratio(6, 4, false).unwrap(), 1.5);
        assert_eq!(spa_ratio(5, 5, false).unwrap(), 1.0);
        assert_eq!(spa_ratio(5, 2, true).unwrap(), 0.0);
        assert!(spa_ratio(3, 0, false).is_err());
    }

    #[test]
    fn evaluation_count() {
        assert_eq!(tree_evaluation_count(2, 2).unwrap(), 9);
        assert_eq!(tree_evaluation_count(0, 5).unwrap(), 1);
        assert_eq!(tree_evaluation_count(3, 3).unwrap(), 64);
        assert!(tree_evaluation_count(u64::MAX, 8).is_err());
    }
}
