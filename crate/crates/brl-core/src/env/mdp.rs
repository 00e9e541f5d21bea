use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for probability rows summing to one.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// A finite tabular MDP with rewards bounded in `[-1, 1]`.
///
/// The transition table is stored as one probability row per `(state,
/// action)` pair, indexed `state * action_count + action`. Instances are
/// immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "MdpJson")]
pub struct Mdp {
    state_count: usize,
    action_count: usize,
    /// `transition[s * A + a][s']` = P(s' | s, a).
    transition: Vec<Vec<f64>>,
    /// `reward[s][a]` in `[-1, 1]`.
    reward: Vec<Vec<f64>>,
    initial_distribution: Vec<f64>,
    discount: f64,
    /// Optional per-state coordinates (set by grid constructors), used by
    /// low-dimensional feature embeddings.
    coords: Option<Vec<[f64; 2]>>,
}

/// JSON document schema: `{states, actions, transition[[..]], reward[[..]], init[..], gamma}`.
#[derive(Debug, Serialize, Deserialize)]
struct MdpJson {
    states: usize,
    actions: usize,
    transition: Vec<Vec<f64>>,
    reward: Vec<Vec<f64>>,
    init: Vec<f64>,
    gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
}

impl From<Mdp> for MdpJson {
    fn from(m: Mdp) -> Self {
        MdpJson {
            states: m.state_count,
            actions: m.action_count,
            transition: m.transition,
            reward: m.reward,
            init: m.initial_distribution,
            gamma: m.discount,
            coords: m.coords,
        }
    }
}

impl<'de> Deserialize<'de> for Mdp {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = MdpJson::deserialize(deserializer)?;
        let mut mdp = Mdp::new(
            raw.states,
            raw.actions,
            raw.transition,
            raw.reward,
            raw.init,
            raw.gamma,
        )
        .map_err(serde::de::Error::custom)?;
        mdp.coords = raw.coords;
        Ok(mdp)
    }
}

impl Mdp {
    /// Build and validate an MDP. Checks every invariant:
    /// transition rows and the initial distribution sum to 1 within 1e-9,
    /// rewards lie in `[-1, 1]`, and the discount is in `(0, 1)`.
    pub fn new(
        state_count: usize,
        action_count: usize,
        transition: Vec<Vec<f64>>,
        reward: Vec<Vec<f64>>,
        initial_distribution: Vec<f64>,
        discount: f64,
    ) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::param("state and action counts must be positive"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::param(format!(
                "discount must lie in (0, 1), got {discount}"
            )));
        }
        if transition.len() != state_count * action_count {
            return Err(Error::validation(format!(
                "transition table has {} rows, expected {}",
                transition.len(),
                state_count * action_count
            )));
        }
        for (row_idx, row) in transition.iter().enumerate() {
            if row.len() != state_count {
                return Err(Error::validation(format!(
                    "transition row {row_idx} has length {}, expected {state_count}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::validation(format!(
                    "transition row {row_idx} contains a value outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::validation(format!(
                    "transition row {row_idx} sums to {sum}, not 1"
                )));
            }
        }
        if reward.len() != state_count {
            return Err(Error::validation("reward table has wrong state count"));
        }
        for (s, row) in reward.iter().enumerate() {
            if row.len() != action_count {
                return Err(Error::validation(format!(
                    "reward row for state {s} has wrong action count"
                )));
            }
            for (a, &r) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&r) {
                    return Err(Error::validation(format!(
                        "reward({s}, {a}) = {r} lies outside [-1, 1]"
                    )));
                }
            }
        }
        if initial_distribution.len() != state_count {
            return Err(Error::validation("initial distribution has wrong length"));
        }
        let init_sum: f64 = initial_distribution.iter().sum();
        if (init_sum - 1.0).abs() > PROB_SUM_TOL
            || initial_distribution.iter().any(|&p| !(0.0..=1.0).contains(&p))
        {
            return Err(Error::validation(format!(
                "initial distribution sums to {init_sum}, not 1"
            )));
        }
        Ok(Mdp {
            state_count,
            action_count,
            transition,
            reward,
            initial_distribution,
            discount,
            coords: None,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.reward[state][action]
    }

    /// P(s' | s, a) as a probability row over next states.
    pub fn transition_row(&self, state: usize, action: usize) -> &[f64] {
        &self.transition[state * self.action_count + action]
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.initial_distribution
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub(crate) fn set_coords(&mut self, coords: Vec<[f64; 2]>) {
        debug_assert_eq!(coords.len(), self.state_count);
        self.coords = Some(coords);
    }

    /// Undiscounted sum of true rewards along a step sequence.
    pub fn clip_return(&self, steps: &[crate::env::Step]) -> f64 {
        steps.iter().map(|st| self.reward(st.state, st.action)).sum()
    }

    /// One-hot embedding of a state-action pair, dimension `S * A`.
    pub fn one_hot_features(&self, state: usize, action: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.state_count * self.action_count];
        v[state * self.action_count + action] = 1.0;
        v
    }

    /// Low-dimensional embedding `[1, x, y, one-hot(action)...]` for MDPs
    /// built on a grid; `None` when no coordinates are attached.
    pub fn coordinate_features(&self, state: usize, action: usize) -> Option<Vec<f64>> {
        let coords = self.coords.as_ref()?;
        let mut v = Vec::with_capacity(3 + self.action_count);
        v.push(1.0);
        v.push(coords[state][0]);
        v.push(coords[state][1]);
        for a in 0..self.action_count {
            v.push(if a == action { 1.0 } else { 0.0 });
        }
        Some(v)
    }

    /// Serialize to the JSON document schema.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parse and validate from the JSON document schema.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_mdp() -> Mdp {
        // Two states, one action: 0 -> 1 deterministically, 1 absorbing.
        Mdp::new(
            2,
            1,
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![0.0], vec![1.0]],
            vec![1.0, 0.0],
            0.9,
        )
        .unwrap()
    }

    #[test]
    fn rejects_unnormalized_transition_row() {
        let err = Mdp::new(
            2,
            1,
            vec![vec![0.5, 0.4], vec![0.0, 1.0]],
            vec![vec![0.0], vec![0.0]],
            vec![1.0, 0.0],
            0.9,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sums to"));
    }

    #[test]
    fn rejects_out_of_bounds_reward() {
        let err = Mdp::new(
            2,
            1,
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![0.0], vec![1.5]],
            vec![1.0, 0.0],
            0.9,
        )
        .unwrap_err();
        assert!(err.to_string().contains("outside [-1, 1]"));
    }

    #[test]
    fn rejects_bad_discount() {
        assert!(Mdp::new(1, 1, vec![vec![1.0]], vec![vec![0.0]], vec![1.0], 1.0).is_err());
        assert!(Mdp::new(1, 1, vec![vec![1.0]], vec![vec![0.0]], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn json_round_trip_preserves_tables() {
        let mdp = tiny_mdp();
        let text = mdp.to_json().unwrap();
        let back = Mdp::from_json(&text).unwrap();
        assert_eq!(mdp, back);
    }

    #[test]
    fn json_load_revalidates() {
        let mut doc: serde_json::Value =
            serde_json::from_str(&tiny_mdp().to_json().unwrap()).unwrap();
        doc["reward"][1][0] = serde_json::json!(2.0);
        assert!(Mdp::from_json(&doc.to_string()).is_err());
    }
}
