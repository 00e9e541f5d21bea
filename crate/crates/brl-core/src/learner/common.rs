use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{LinkLoss, RewardLabeledDataset};

/// Which desk-scale learner to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    PessimisticFqi,
    ConservativeQ,
    ModelBasedPessimistic,
    PreferenceBellman,
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pessimistic_fqi" | "fqi" => Ok(LearnerKind::PessimisticFqi),
            "conservative_q" | "cq" => Ok(LearnerKind::ConservativeQ),
            "model_based_pessimistic" | "model_based" | "mb" => Ok(LearnerKind::ModelBasedPessimistic),
            "preference_bellman" | "pb" => Ok(LearnerKind::PreferenceBellman),
            other => Err(Error::param(format!("unknown learner '{other}'"))),
        }
    }
}

impl LearnerKind {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::PessimisticFqi => "pessimistic_fqi",
            LearnerKind::ConservativeQ => "conservative_q",
            LearnerKind::ModelBasedPessimistic => "model_based_pessimistic",
            LearnerKind::PreferenceBellman => "preference_bellman",
        }
    }
}

/// Shared learner configuration. `alpha` weighs the conservative action
/// penalty, `lambda` the count-based reward pessimism, `learning_rate` and
/// `link_loss` drive the preference-Bellman learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub algorithm: LearnerKind,
    pub state_count: usize,
    pub action_count: usize,
    pub discount: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub tolerance: f64,
    pub learning_rate: f64,
    pub link_loss: LinkLoss,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(algorithm: LearnerKind, state_count: usize, action_count: usize) -> Self {
        LearnerConfig {
            algorithm,
            state_count,
            action_count,
            discount: 0.99,
            alpha: 1.0,
            lambda: 1.0,
            iterations: 4000,
            tolerance: 1e-9,
            learning_rate: 0.05,
            link_loss: LinkLoss::SigmoidNll,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_count == 0 || self.action_count == 0 {
            return Err(Error::param("state and action counts must be positive"));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::param("discount must lie in (0, 1)"));
        }
        if self.alpha < 0.0 || self.lambda < 0.0 {
            return Err(Error::param("penalty weights must be non-negative"));
        }
        Ok(())
    }
}

/// Sufficient statistics of a reward-labeled dataset: visit counts, mean
/// rewards (duplicates averaged), and empirical successor distributions.
pub(crate) struct DatasetStats {
    pub visits: Vec<Vec<usize>>,
    pub mean_reward: Vec<Vec<f64>>,
    /// Empirical `P(s' | s, a)` as sparse rows.
    pub successors: BTreeMap<(usize, usize), Vec<(usize, f64)>>,
    /// Actions with at least one visit, per state.
    pub visited_actions: Vec<Vec<usize>>,
    /// Total visits per state.
    pub state_visits: Vec<usize>,
}

impl DatasetStats {
    pub fn from_labeled(
        data: &RewardLabeledDataset,
        states: usize,
        actions: usize,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::param("dataset is empty"));
        }
        let mut visits = vec![vec![0usize; actions]; states];
        let mut reward_sum = vec![vec![0.0f64; actions]; states];
        let mut succ_counts: BTreeMap<(usize, usize), BTreeMap<usize, usize>> = BTreeMap::new();
        for t in data.tuples() {
            if t.state >= states || t.action >= actions || t.next_state >= states {
                return Err(Error::validation(format!(
                    "tuple ({}, {}, {}) exceeds the configured space {states}x{actions}",
                    t.state, t.action, t.next_state
                )));
            }
            visits[t.state][t.action] += 1;
            reward_sum[t.state][t.action] += t.reward;
            *succ_counts
                .entry((t.state, t.action))
                .or_default()
                .entry(t.next_state)
                .or_insert(0) += 1;
        }
        let mean_reward = (0..states)
            .map(|s| {
                (0..actions)
                    .map(|a| {
                        if visits[s][a] > 0 {
                            reward_sum[s][a] / visits[s][a] as f64
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let successors = succ_counts
            .into_iter()
            .map(|((s, a), counts)| {
                let n = visits[s][a] as f64;
                let row = counts.into_iter().map(|(s2, c)| (s2, c as f64 / n)).collect();
                ((s, a), row)
            })
            .collect();
        let visited_actions: Vec<Vec<usize>> = (0..states)
            .map(|s| (0..actions).filter(|&a| visits[s][a] > 0).collect())
            .collect();
        let state_visits = (0..states).map(|s| visits[s].iter().sum()).collect();
        Ok(DatasetStats { visits, mean_reward, successors, visited_actions, state_visits })
    }

    /// Empirical behavior probability `n(s, a) / n(s)`; 0 for unvisited.
    pub fn behavior_prob(&self, state: usize, action: usize) -> f64 {
        if self.state_visits[state] == 0 {
            0.0
        } else {
            self.visits[state][action] as f64 / self.state_visits[state] as f64
        }
    }
}
