//! Conservative Q fitting: a value penalty `alpha * (1 - p_data(a | s))`
//! pushes actions the behavior policy rarely took out of the backup maxima
//! and the greedy extraction, shrinking toward the data distribution as
//! `alpha` grows.

use crate::env::Policy;
use crate::error::Result;
use crate::label::RewardLabeledDataset;
use crate::learner::common::{DatasetStats, LearnerConfig};
use crate::learner::qtable::QTable;

pub fn fit_conservative_q(data: &RewardLabeledDataset, config: &LearnerConfig) -> Result<Policy> {
    fit_conservative_q_q(data, config).map(|(policy, _)| policy)
}

/// As [`fit_conservative_q`] but also returns the fitted (unpenalized) Q
/// table.
pub fn fit_conservative_q_q(
    data: &RewardLabeledDataset,
    config: &LearnerConfig,
) -> Result<(Policy, QTable)> {
    config.validate()?;
    let stats = DatasetStats::from_labeled(data, config.state_count, config.action_count)?;
    let gamma = config.discount;
    let alpha = config.alpha;
    let mut q = QTable::new(config.state_count, config.action_count, gamma, 0.0)?;

    let penalized_max = |q: &QTable, s: usize| -> f64 {
        (0..config.action_count)
            .map(|a| q.get(s, a) - alpha * (1.0 - stats.behavior_prob(s, a)))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    for _ in 0..config.iterations {
        let mut delta: f64 = 0.0;
        let mut next = q.clone();
        for (&(s, a), succ) in &stats.successors {
            let future: f64 = succ.iter().map(|&(s2, p)| p * penalized_max(&q, s2)).sum();
            let value = stats.mean_reward[s][a] + gamma * future;
            delta = delta.max((value - q.get(s, a)).abs());
            next.set(s, a, value);
        }
        q = next;
        if delta <= config.tolerance {
            break;
        }
    }

    // Extraction uses the penalized values, restricted to data support.
    let mut penalized = q.clone();
    for s in 0..config.state_count {
        for a in 0..config.action_count {
            penalized.set(s, a, q.get(s, a) - alpha * (1.0 - stats.behavior_prob(s, a)));
        }
    }
    let policy = penalized.greedy_restricted(&stats.visited_actions)?;
    Ok((policy, q))
}
