//! Q-learning directly on preference signals.
//!
//! The objective scores a Q table through its derived rewards
//! `d(s, a) = Q(s, a) - gamma * max_a' Q(s', a')`, bounded in `[-1, 1]` on
//! dataset transitions. Descending in Q space couples coordinates through
//! shared next-state maxima (an entry referenced by k incoming argmax terms
//! carries a `1 - k * gamma` factor, which flips sign), so the descent runs
//! in derived-reward space instead, where the bound is a plain clip and the
//! per-pair objective is monotone per coordinate. The result re-telescopes
//! into a Q table via Bellman backups with the fitted derived rewards.

use std::collections::BTreeMap;

use crate::env::Policy;
use crate::error::{Error, Result};
use crate::label::compile_pair_coefficients;
use crate::learner::common::LearnerConfig;
use crate::learner::qtable::QTable;
use crate::pref::PreferenceDataset;

pub fn fit_preference_bellman(
    dataset: &PreferenceDataset,
    config: &LearnerConfig,
) -> Result<Policy> {
    fit_preference_bellman_q(dataset, config).map(|(policy, _)| policy)
}

/// As [`fit_preference_bellman`] but also returns the fitted Q table.
pub fn fit_preference_bellman_q(
    dataset: &PreferenceDataset,
    config: &LearnerConfig,
) -> Result<(Policy, QTable)> {
    config.validate()?;
    if !dataset.is_single_label() {
        return Err(Error::validation(
            "preference-Bellman learning expects a single-label dataset",
        ));
    }
    if !config.link_loss.is_decreasing() {
        return Err(Error::param("link-loss must be monotonically decreasing"));
    }
    let mut successors: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for pair in dataset.pairs() {
        for clip in [&pair.clip_1, &pair.clip_2] {
            for st in &clip.steps {
                if st.state >= config.state_count
                    || st.action >= config.action_count
                    || st.next_state >= config.state_count
                {
                    return Err(Error::validation(format!(
                        "clip step ({}, {}, {}) exceeds the configured space",
                        st.state, st.action, st.next_state
                    )));
                }
                successors.entry((st.state, st.action)).or_default().push(st.next_state);
            }
        }
    }

    // Projected descent on the shared derived rewards. The step is
    // normalized by the gradient sup-norm: the link-loss slope on a pair
    // vanishes as its gap saturates, and normalization keeps the remaining
    // pairs moving.
    let compiled = compile_pair_coefficients(dataset)?;
    let k = compiled.state_actions.len();
    let mut derived = vec![0.0f64; k];
    for step in 0..config.iterations {
        let gaps = compiled.gaps(&derived);
        let slopes: Vec<f64> = gaps.iter().map(|&g| config.link_loss.derivative(g)).collect();
        let mut grad = vec![0.0f64; k];
        for (coefs, &slope) in compiled.pair_coefs.iter().zip(&slopes) {
            for &(idx, c) in coefs {
                grad[idx] += slope * c;
            }
        }
        let norm = grad.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if norm < 1e-15 {
            break;
        }
        let mut moved: f64 = 0.0;
        for (dk, gk) in derived.iter_mut().zip(&grad) {
            let next = (*dk - config.learning_rate * gk / norm).clamp(-1.0, 1.0);
            moved = moved.max((next - *dk).abs());
            *dk = next;
        }
        if !moved.is_finite() {
            return Err(Error::Diverged {
                step: step + 1,
                msg: "derived rewards left the reals".into(),
            });
        }
        if moved <= config.tolerance {
            break;
        }
    }

    // Re-telescope: Q(s, a) = d(s, a) + gamma * mean over observed
    // successors of max_a' Q(s', a'), run to the backup fixpoint.
    let mut q = QTable::new(config.state_count, config.action_count, config.discount, 0.0)?;
    let d_by_sa: BTreeMap<(usize, usize), f64> = compiled
        .state_actions
        .iter()
        .copied()
        .zip(derived.iter().copied())
        .collect();
    for _ in 0..8000 {
        let mut delta: f64 = 0.0;
        for (&(s, a), succ) in &successors {
            let future: f64 =
                succ.iter().map(|&s2| q.max_value(s2)).sum::<f64>() / succ.len() as f64;
            let value = d_by_sa[&(s, a)] + config.discount * future;
            delta = delta.max((value - q.get(s, a)).abs());
            q.set(s, a, value);
        }
        if delta <= 1e-13 {
            break;
        }
    }

    let mut allowed = vec![Vec::new(); config.state_count];
    for &(s, a) in successors.keys() {
        allowed[s].push(a);
    }
    let policy = q.greedy_restricted(&allowed)?;
    Ok((policy, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::LinkLoss;
    use crate::learner::common::LearnerKind;
    use crate::learner::qloss::preference_bellman_loss;
    use crate::pref::synthetic;

    #[test]
    fn initial_zero_q_loss_is_log_two_per_pair() {
        let ds = synthetic::no_overlap_dataset(40, 4, 5, 3, 1).unwrap();
        let q = QTable::new(40, 4, 0.99, 0.0).unwrap();
        let loss = preference_bellman_loss(&q, &ds, &LinkLoss::SigmoidNll).unwrap();
        assert!((loss - 5.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn training_pushes_chosen_derived_rewards_positive() {
        let ds = synthetic::no_overlap_dataset(60, 4, 8, 3, 2).unwrap();
        let config = LearnerConfig::new(LearnerKind::PreferenceBellman, 60, 4);
        let (_, q) = fit_preference_bellman_q(&ds, &config).unwrap();
        let mut chosen_total = 0usize;
        let mut chosen_positive = 0usize;
        for pair in ds.pairs() {
            let (chosen, _) = pair.chosen_rejected().unwrap();
            for st in &chosen.steps {
                chosen_total += 1;
                if q.derived_reward(st.state, st.action, st.next_state) > 0.0 {
                    chosen_positive += 1;
                }
            }
        }
        let frac = chosen_positive as f64 / chosen_total as f64;
        assert!(frac >= 0.9, "positive derived-reward fraction {frac}");
    }

    #[test]
    fn training_reduces_the_preference_bellman_loss() {
        let ds = synthetic::no_overlap_dataset(60, 4, 6, 3, 5).unwrap();
        let config = LearnerConfig::new(LearnerKind::PreferenceBellman, 60, 4);
        let (_, q) = fit_preference_bellman_q(&ds, &config).unwrap();
        let initial = preference_bellman_loss(
            &QTable::new(60, 4, 0.99, 0.0).unwrap(),
            &ds,
            &LinkLoss::SigmoidNll,
        )
        .unwrap();
        let trained = preference_bellman_loss(&q, &ds, &LinkLoss::SigmoidNll).unwrap();
        assert!(trained < initial, "{trained} !< {initial}");
    }

    #[test]
    fn bound_holds_on_dataset_transitions_after_training() {
        let ds = synthetic::no_overlap_dataset(60, 4, 6, 3, 3).unwrap();
        let config = LearnerConfig::new(LearnerKind::PreferenceBellman, 60, 4);
        let (_, q) = fit_preference_bellman_q(&ds, &config).unwrap();
        let transitions: Vec<(usize, usize, usize)> = ds
            .pairs()
            .iter()
            .flat_map(|p| p.clip_1.steps.iter().chain(&p.clip_2.steps))
            .map(|st| (st.state, st.action, st.next_state))
            .collect();
        assert!(q.derived_bound_violation(&transitions) <= 1e-9);
    }

    #[test]
    fn multi_label_input_is_rejected() {
        use crate::env::{Step, TrajectoryClip};
        use crate::pref::{LinkFunction, PreferencePair};
        let clip = |id: u64, s: usize| {
            TrajectoryClip::new(id, vec![Step { state: s, action: 0, next_state: s }]).unwrap()
        };
        let ds = crate::pref::PreferenceDataset::new(
            vec![PreferencePair { pair_id: 0, clip_1: clip(0, 0), clip_2: clip(1, 1), labels: vec![1, 2] }],
            1,
            LinkFunction::Sigmoid,
        )
        .unwrap();
        let config = LearnerConfig::new(LearnerKind::PreferenceBellman, 2, 1);
        assert!(fit_preference_bellman(&ds, &config).is_err());
    }
}
