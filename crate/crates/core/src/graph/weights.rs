use serde::{Deserialize, Serialize};

use super::{GraphError, Result, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Every edge must already carry a weight.
    Precomputed,
    /// Weights come from the in-degree of the edge's target.
    DegreeStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightPolicy {
    /// In-degree at which an edge becomes untraversable.
    pub tau: usize,
    pub mode: WeightMode,
}

impl Default for WeightPolicy {
    fn default() -> Self {
        WeightPolicy {
            tau: 1001,
            mode: WeightMode::DegreeStep,
        }
    }
}

impl WeightPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.tau < 2 {
            return Err(GraphError::Policy(format!("tau must be >= 2, got {}", self.tau)));
        }
        Ok(())
    }

    /// `1 + floor(log10 d)` for `d < tau`, `None` (edge removed) otherwise.
    /// A target with in-degree 0 cannot have an incoming edge; it is treated
    /// like degree 1.
    pub fn step_weight(&self, in_degree: usize) -> Option<Weight> {
        if in_degree >= self.tau {
            return None;
        }
        let d = in_degree.max(1);
        Some(1 + d.ilog10() as Weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_function_values() {
        let p = WeightPolicy::default();
        assert_eq!(p.step_weight(1), Some(1));
        assert_eq!(p.step_weight(9), Some(1));
        assert_eq!(p.step_weight(10), Some(2));
        assert_eq!(p.step_weight(100), Some(3));
        assert_eq!(p.step_weight(1000), Some(4));
        assert_eq!(p.step_weight(1001), None);
        assert_eq!(p.step_weight(1500), None);
    }

    #[test]
    fn tau_below_two_rejected() {
        let p = WeightPolicy {
            tau: 1,
            mode: WeightMode::DegreeStep,
        };
        assert!(p.validate().is_err());
    }
}
