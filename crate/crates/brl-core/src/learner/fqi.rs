//! Fitted Q-iteration with count-based pessimism: Bellman backups run only
//! on dataset-supported state-actions, everything else sits at the value
//! floor, and the greedy policy never leaves the data support.

use crate::env::Policy;
use crate::error::Result;
use crate::label::RewardLabeledDataset;
use crate::learner::common::{DatasetStats, LearnerConfig};
use crate::learner::qtable::QTable;

pub fn fit_pessimistic_fqi(data: &RewardLabeledDataset, config: &LearnerConfig) -> Result<Policy> {
    fit_pessimistic_fqi_q(data, config).map(|(policy, _)| policy)
}

/// As [`fit_pessimistic_fqi`] but also returns the fitted Q table.
pub fn fit_pessimistic_fqi_q(
    data: &RewardLabeledDataset,
    config: &LearnerConfig,
) -> Result<(Policy, QTable)> {
    config.validate()?;
    let stats = DatasetStats::from_labeled(data, config.state_count, config.action_count)?;
    let gamma = config.discount;
    // Lowest attainable value given rewards in [-1, 1]; unvisited pairs
    // stay pinned here.
    let q_floor = -1.0 / (1.0 - gamma);
    let mut q = QTable::new(config.state_count, config.action_count, gamma, q_floor)?;
    for _ in 0..config.iterations {
        let mut delta: f64 = 0.0;
        let mut next = q.clone();
        for (&(s, a), succ) in &stats.successors {
            let future: f64 = succ.iter().map(|&(s2, p)| p * q.max_value(s2)).sum();
            let value = stats.mean_reward[s][a] + gamma * future;
            delta = delta.max((value - q.get(s, a)).abs());
            next.set(s, a, value);
        }
        q = next;
        if delta <= config.tolerance {
            break;
        }
    }
    let policy = q.greedy_restricted(&stats.visited_actions)?;
    Ok((policy, q))
}
