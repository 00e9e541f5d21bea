//! Binary reward labeling: every step of the preferred clip earns +1 and
//! every step of the other clip earns -1. On overlap-free datasets these are
//! the loss-minimizing labels for any decreasing link-loss; with repeats, an
//! averaging learner effectively sees the mean of the +-1 labels per
//! state-action.

use crate::error::{Error, Result};
use crate::label::types::{LabelMethod, LabelingMeta, Provenance, RewardLabeledDataset, RewardTuple, Side};
use crate::pref::PreferenceDataset;

/// Label a single-label preference dataset with binary rewards.
///
/// Tuples are emitted in pair order, `clip_1` steps before `clip_2` steps;
/// the sign follows the pair's label.
pub fn binary_label(dataset: &PreferenceDataset) -> Result<RewardLabeledDataset> {
    if !dataset.is_single_label() {
        return Err(Error::validation(
            "dataset has multi-label pairs; use multilabel_label",
        ));
    }
    let mut tuples = Vec::with_capacity(dataset.len() * 2 * dataset.clip_length());
    let mut provenance = Vec::with_capacity(tuples.capacity());
    for pair in dataset.pairs() {
        let first_chosen = pair.labels[0] == 1;
        for (clip, is_chosen) in [(&pair.clip_1, first_chosen), (&pair.clip_2, !first_chosen)] {
            let (reward, side) = if is_chosen {
                (1.0, Side::Chosen)
            } else {
                (-1.0, Side::Rejected)
            };
            for (t, step) in clip.steps.iter().enumerate() {
                tuples.push(RewardTuple {
                    state: step.state,
                    action: step.action,
                    reward,
                    next_state: step.next_state,
                });
                provenance.push(Provenance { pair_id: pair.pair_id, side, t });
            }
        }
    }
    RewardLabeledDataset::new(tuples, provenance, LabelingMeta::for_method(LabelMethod::Binary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Step, TrajectoryClip};
    use crate::pref::{LinkFunction, PreferencePair};

    fn two_step_pair(label: u8) -> PreferenceDataset {
        let clip = |id: u64, s0: usize| {
            TrajectoryClip::new(
                id,
                vec![
                    Step { state: s0, action: 0, next_state: s0 + 1 },
                    Step { state: s0 + 1, action: 1, next_state: s0 + 2 },
                ],
            )
            .unwrap()
        };
        PreferenceDataset::new(
            vec![PreferencePair {
                pair_id: 0,
                clip_1: clip(0, 0),
                clip_2: clip(1, 10),
                labels: vec![label],
            }],
            2,
            LinkFunction::Sigmoid,
        )
        .unwrap()
    }

    #[test]
    fn label_one_orders_rewards_plus_then_minus() {
        let labeled = binary_label(&two_step_pair(1)).unwrap();
        let rewards: Vec<f64> = labeled.tuples().iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![1.0, 1.0, -1.0, -1.0]);
        let sides: Vec<Side> = labeled.provenance().iter().map(|p| p.side).collect();
        assert_eq!(sides, vec![Side::Chosen, Side::Chosen, Side::Rejected, Side::Rejected]);
    }

    #[test]
    fn label_two_flips_the_orientation() {
        let labeled = binary_label(&two_step_pair(2)).unwrap();
        let rewards: Vec<f64> = labeled.tuples().iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn both_side_state_action_averages_to_zero() {
        // The same (state, action) chained into a chosen and a rejected clip.
        let shared_chosen = TrajectoryClip::new(
            0,
            vec![Step { state: 5, action: 2, next_state: 6 }],
        )
        .unwrap();
        let other = TrajectoryClip::new(1, vec![Step { state: 7, action: 0, next_state: 8 }]).unwrap();
        let shared_rejected =
            TrajectoryClip::new(2, vec![Step { state: 5, action: 2, next_state: 6 }]).unwrap();
        let another = TrajectoryClip::new(3, vec![Step { state: 9, action: 1, next_state: 1 }]).unwrap();
        let ds = PreferenceDataset::new(
            vec![
                PreferencePair { pair_id: 0, clip_1: shared_chosen, clip_2: other, labels: vec![1] },
                PreferencePair { pair_id: 1, clip_1: another, clip_2: shared_rejected, labels: vec![1] },
            ],
            1,
            LinkFunction::Sigmoid,
        )
        .unwrap();
        let labeled = binary_label(&ds).unwrap();
        assert_eq!(labeled.len(), 4);
        let means = labeled.mean_reward_by_state_action();
        assert_eq!(means[&(5, 2)], 0.0);
    }

    #[test]
    fn multi_label_pairs_are_rejected() {
        let clip = |id: u64, s: usize| {
            TrajectoryClip::new(id, vec![Step { state: s, action: 0, next_state: s }]).unwrap()
        };
        let ds = PreferenceDataset::new(
            vec![PreferencePair {
                pair_id: 0,
                clip_1: clip(0, 0),
                clip_2: clip(1, 1),
                labels: vec![1, 2, 1],
            }],
            1,
            LinkFunction::Sigmoid,
        )
        .unwrap();
        let err = binary_label(&ds).unwrap_err();
        assert!(err.to_string().contains("multilabel_label"));
    }

    #[test]
    fn swapping_clips_and_label_yields_the_same_tuples_up_to_order() {
        let ds = two_step_pair(1);
        let swapped = {
            let p = &ds.pairs()[0];
            PreferenceDataset::new(
                vec![PreferencePair {
                    pair_id: p.pair_id,
                    clip_1: p.clip_2.clone(),
                    clip_2: p.clip_1.clone(),
                    labels: vec![2],
                }],
                2,
                LinkFunction::Sigmoid,
            )
            .unwrap()
        };
        let a = binary_label(&ds).unwrap();
        let b = binary_label(&swapped).unwrap();
        let mut ta: Vec<_> = a.iter().map(|(t, p)| (*t, *p)).collect();
        let mut tb: Vec<_> = b.iter().map(|(t, p)| (*t, *p)).collect();
        let key = |(t, p): &(RewardTuple, Provenance)| {
            (t.state, t.action, t.next_state, p.pair_id, p.t, t.reward as i64)
        };
        ta.sort_by_key(key);
        tb.sort_by_key(key);
        assert_eq!(ta, tb);
    }
}
