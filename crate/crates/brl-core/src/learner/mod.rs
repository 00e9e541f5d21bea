//! Desk-scale offline RL learners over reward-labeled datasets, plus the
//! preference-native Q learner and the true-reward oracle harness.

mod common;
mod conservative;
mod fqi;
mod model_based;
mod pref_bellman;
mod qloss;
mod qtable;

pub use common::{LearnerConfig, LearnerKind};
pub use conservative::{fit_conservative_q, fit_conservative_q_q};
pub use fqi::{fit_pessimistic_fqi, fit_pessimistic_fqi_q};
pub use model_based::{fit_model_based, fit_model_based_q};
pub use pref_bellman::{fit_preference_bellman, fit_preference_bellman_q};
pub use qloss::{
    bellman_label_grad, bellman_label_loss, pair_derived_gap, preference_bellman_grad,
    preference_bellman_loss, project_derived_bounds,
};
pub use qtable::QTable;

use crate::env::{Mdp, Policy};
use crate::error::{Error, Result};
use crate::label::{LabelMethod, RewardLabeledDataset};

/// Run the learner selected by `config.algorithm` on a reward-labeled
/// dataset. The preference-Bellman learner consumes preference datasets
/// directly and is not dispatched here.
pub fn fit(data: &RewardLabeledDataset, config: &LearnerConfig) -> Result<Policy> {
    match config.algorithm {
        LearnerKind::PessimisticFqi => fit_pessimistic_fqi(data, config),
        LearnerKind::ConservativeQ => fit_conservative_q(data, config),
        LearnerKind::ModelBasedPessimistic => fit_model_based(data, config),
        LearnerKind::PreferenceBellman => Err(Error::param(
            "preference_bellman consumes preference datasets; call fit_preference_bellman",
        )),
    }
}

/// Relabel the dataset with the environment's true rewards over the same
/// state-action coverage, then run the configured learner. Test-harness
/// upper reference; requires ground-truth access.
pub fn fit_oracle(mdp: &Mdp, data: &RewardLabeledDataset, config: &LearnerConfig) -> Result<Policy> {
    let relabeled = data.relabel(|s, a| mdp.reward(s, a), LabelMethod::TrueReward)?;
    fit(&relabeled, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{evaluate_policy, make_gridworld, Policy as EnvPolicy};
    use crate::label::binary_label;
    use crate::pref::{generate_dataset, BehaviorPolicy, LinkFunction};

    #[test]
    fn oracle_on_covered_grid_is_near_optimal() {
        let mdp = make_gridworld(3, 3, 1.0, -0.01, 0.1, 0).unwrap();
        let behavior = BehaviorPolicy::single(EnvPolicy::uniform(9, 4));
        let ds = generate_dataset(&mdp, &behavior, 120, 10, LinkFunction::Sigmoid, 3).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let config = LearnerConfig::new(LearnerKind::PessimisticFqi, 9, 4);
        let policy = fit_oracle(&mdp, &labeled, &config).unwrap();
        let score = evaluate_policy(&mdp, &policy).unwrap().normalized_score;
        assert!(score >= 90.0, "score {score}");
    }

    #[test]
    fn oracle_is_deterministic_per_seed() {
        let mdp = make_gridworld(3, 3, 1.0, -0.01, 0.2, 0).unwrap();
        let behavior = BehaviorPolicy::single(EnvPolicy::uniform(9, 4));
        let ds = generate_dataset(&mdp, &behavior, 40, 8, LinkFunction::Sigmoid, 4).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let config = LearnerConfig::new(LearnerKind::ConservativeQ, 9, 4);
        let a = fit_oracle(&mdp, &labeled, &config).unwrap();
        let b = fit_oracle(&mdp, &labeled, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dispatch_rejects_preference_bellman() {
        let mdp = make_gridworld(2, 2, 1.0, 0.0, 0.0, 0).unwrap();
        let behavior = BehaviorPolicy::single(EnvPolicy::uniform(4, 4));
        let ds = generate_dataset(&mdp, &behavior, 4, 4, LinkFunction::Sigmoid, 1).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let config = LearnerConfig::new(LearnerKind::PreferenceBellman, 4, 4);
        assert!(fit(&labeled, &config).is_err());
    }
}
