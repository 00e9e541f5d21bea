//! Model-based pessimistic learning: maximum-likelihood transition model,
//! mean-label reward model, a count-based reward penalty
//! `lambda / sqrt(n(s, a))`, and value iteration on the learned model.
//! Unseen state-actions default to an absorbing self-loop with reward -1.

use crate::env::Policy;
use crate::error::Result;
use crate::label::RewardLabeledDataset;
use crate::learner::common::{DatasetStats, LearnerConfig};
use crate::learner::qtable::QTable;

pub fn fit_model_based(data: &RewardLabeledDataset, config: &LearnerConfig) -> Result<Policy> {
    fit_model_based_q(data, config).map(|(policy, _)| policy)
}

/// As [`fit_model_based`] but also returns the Q table of the learned model.
pub fn fit_model_based_q(
    data: &RewardLabeledDataset,
    config: &LearnerConfig,
) -> Result<(Policy, QTable)> {
    config.validate()?;
    let stats = DatasetStats::from_labeled(data, config.state_count, config.action_count)?;
    let gamma = config.discount;

    // Pessimistic rewards; may drop below -1 by design of the penalty.
    let mut reward = vec![vec![-1.0f64; config.action_count]; config.state_count];
    for s in 0..config.state_count {
        for a in 0..config.action_count {
            let n = stats.visits[s][a];
            if n > 0 {
                reward[s][a] = stats.mean_reward[s][a] - config.lambda / (n as f64).sqrt();
            }
        }
    }

    // Value iteration on the learned model; unseen pairs self-loop.
    let mut values = vec![0.0f64; config.state_count];
    let mut q = QTable::new(config.state_count, config.action_count, gamma, 0.0)?;
    for _ in 0..config.iterations {
        let mut delta: f64 = 0.0;
        for s in 0..config.state_count {
            let mut best = f64::NEG_INFINITY;
            for a in 0..config.action_count {
                let future = match stats.successors.get(&(s, a)) {
                    Some(succ) => succ.iter().map(|&(s2, p)| p * values[s2]).sum(),
                    None => values[s],
                };
                let qa = reward[s][a] + gamma * future;
                q.set(s, a, qa);
                best = best.max(qa);
            }
            delta = delta.max((best - values[s]).abs());
            values[s] = best;
        }
        if delta <= config.tolerance {
            break;
        }
    }
    let policy = q.greedy_restricted(&stats.visited_actions)?;
    Ok((policy, q))
}
