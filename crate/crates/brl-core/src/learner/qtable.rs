use serde::{Deserialize, Serialize};

use crate::env::Policy;
use crate::error::{Error, Result};

/// Tabular action-value function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    values: Vec<Vec<f64>>,
    discount: f64,
}

impl QTable {
    pub fn new(state_count: usize, action_count: usize, discount: f64, fill: f64) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::param("state and action counts must be positive"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::param("discount must lie in (0, 1)"));
        }
        Ok(QTable { values: vec![vec![fill; action_count]; state_count], discount })
    }

    pub fn state_count(&self) -> usize {
        self.values.len()
    }

    pub fn action_count(&self) -> usize {
        self.values[0].len()
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state][action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state][action] = value;
    }

    /// Highest-valued action; ties break toward the lowest index.
    pub fn max_action(&self, state: usize) -> usize {
        let row = &self.values[state];
        let mut best = 0;
        for (a, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.values[state][self.max_action(state)]
    }

    /// Reward implied by the Bellman identity on a transition:
    /// `Q(s, a) - gamma * max_a' Q(s', a')`.
    pub fn derived_reward(&self, state: usize, action: usize, next_state: usize) -> f64 {
        self.get(state, action) - self.discount * self.max_value(next_state)
    }

    /// Largest violation of the `[-1, 1]` derived-reward bound over a set
    /// of transitions.
    pub fn derived_bound_violation(&self, transitions: &[(usize, usize, usize)]) -> f64 {
        transitions
            .iter()
            .map(|&(s, a, s2)| {
                let r = self.derived_reward(s, a, s2);
                (r.abs() - 1.0).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Greedy policy restricted to the allowed actions per state (ties
    /// toward the lowest index); states with no allowed action fall back to
    /// action 0.
    pub fn greedy_restricted(&self, allowed: &[Vec<usize>]) -> Result<Policy> {
        let actions: Vec<usize> = (0..self.state_count())
            .map(|s| {
                let mut best: Option<usize> = None;
                for &a in &allowed[s] {
                    best = Some(match best {
                        None => a,
                        Some(b) if self.values[s][a] > self.values[s][b] => a,
                        Some(b) => b,
                    });
                }
                best.unwrap_or(0)
            })
            .collect();
        Policy::deterministic(&actions, self.action_count())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let q: QTable = serde_json::from_str(text)?;
        if q.values.is_empty() || q.values.iter().any(|row| row.len() != q.values[0].len()) {
            return Err(Error::validation("ragged Q table"));
        }
        Ok(q)
    }

    /// Flatten to a parameter vector indexed `state * action_count + action`.
    pub fn flatten(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn from_flat(
        params: &[f64],
        state_count: usize,
        action_count: usize,
        discount: f64,
    ) -> Result<Self> {
        if params.len() != state_count * action_count {
            return Err(Error::param("flat parameter length mismatch"));
        }
        let values = params.chunks(action_count).map(|c| c.to_vec()).collect();
        Ok(QTable { values, discount })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_low() {
        let mut q = QTable::new(1, 3, 0.9, 0.0).unwrap();
        q.set(0, 1, 1.0);
        q.set(0, 2, 1.0);
        assert_eq!(q.max_action(0), 1);
    }

    #[test]
    fn derived_reward_telescopes() {
        let mut q = QTable::new(2, 2, 0.5, 0.0).unwrap();
        q.set(0, 0, 1.0);
        q.set(1, 1, 0.8);
        assert!((q.derived_reward(0, 0, 1) - (1.0 - 0.5 * 0.8)).abs() < 1e-12);
    }

    #[test]
    fn restricted_greedy_ignores_disallowed_actions() {
        let mut q = QTable::new(2, 3, 0.9, 0.0).unwrap();
        q.set(0, 2, 5.0);
        q.set(0, 1, 1.0);
        let allowed = vec![vec![1], vec![]];
        let policy = q.greedy_restricted(&allowed).unwrap();
        assert_eq!(policy.greedy_action(0), 1);
        assert_eq!(policy.greedy_action(1), 0);
    }

    #[test]
    fn json_round_trip() {
        let mut q = QTable::new(2, 2, 0.95, -1.0).unwrap();
        q.set(1, 1, 3.5);
        let back = QTable::from_json(&q.to_json().unwrap()).unwrap();
        assert_eq!(q, back);
    }
}
