use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::env::mdp::PROB_SUM_TOL;

/// A stationary stochastic policy: one action distribution per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    action_distribution: Vec<Vec<f64>>,
}

impl Policy {
    /// Validate that each row is a probability distribution.
    pub fn new(action_distribution: Vec<Vec<f64>>) -> Result<Self> {
        if action_distribution.is_empty() {
            return Err(Error::param("policy must cover at least one state"));
        }
        let actions = action_distribution[0].len();
        for (s, row) in action_distribution.iter().enumerate() {
            if row.len() != actions || actions == 0 {
                return Err(Error::validation(format!(
                    "policy row {s} has inconsistent action count"
                )));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::validation(format!(
                    "policy row {s} contains a value outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::validation(format!(
                    "policy row {s} sums to {sum}, not 1"
                )));
            }
        }
        Ok(Policy { action_distribution })
    }

    /// Deterministic policy from one action index per state.
    pub fn deterministic(actions: &[usize], action_count: usize) -> Result<Self> {
        let rows = actions
            .iter()
            .map(|&a| {
                if a >= action_count {
                    return Err(Error::param(format!("action {a} out of range")));
                }
                let mut row = vec![0.0; action_count];
                row[a] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Policy::new(rows)
    }

    /// Uniform-random policy.
    pub fn uniform(state_count: usize, action_count: usize) -> Self {
        let row = vec![1.0 / action_count as f64; action_count];
        Policy {
            action_distribution: vec![row; state_count],
        }
    }

    /// Mix this policy with uniform exploration: `(1 - eps) * self + eps * uniform`.
    pub fn epsilon_greedy(&self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::param(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let actions = self.action_count();
        let uniform = epsilon / actions as f64;
        let rows = self
            .action_distribution
            .iter()
            .map(|row| row.iter().map(|&p| (1.0 - epsilon) * p + uniform).collect())
            .collect();
        Policy::new(rows)
    }

    pub fn state_count(&self) -> usize {
        self.action_distribution.len()
    }

    pub fn action_count(&self) -> usize {
        self.action_distribution[0].len()
    }

    /// π(a | s) row.
    pub fn action_probs(&self, state: usize) -> &[f64] {
        &self.action_distribution[state]
    }

    /// Greedy action under this policy (highest probability, lowest index on ties).
    pub fn greedy_action(&self, state: usize) -> usize {
        let row = &self.action_distribution[state];
        let mut best = 0;
        for (a, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Policy = serde_json::from_str(text)?;
        Policy::new(p.action_distribution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_rows_are_normalized() {
        let p = Policy::uniform(3, 4);
        for s in 0..3 {
            let sum: f64 = p.action_probs(s).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_greedy_interpolates() {
        let base = Policy::deterministic(&[1, 0], 2).unwrap();
        let mixed = base.epsilon_greedy(0.5).unwrap();
        assert_eq!(mixed.action_probs(0), &[0.25, 0.75]);
        assert_eq!(mixed.action_probs(1), &[0.75, 0.25]);
    }

    #[test]
    fn rejects_unnormalized_rows() {
        assert!(Policy::new(vec![vec![0.5, 0.4]]).is_err());
    }
}
