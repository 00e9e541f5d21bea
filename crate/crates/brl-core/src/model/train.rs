use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{LabelMethod, LabelingMeta, LinkLoss, Provenance, RewardLabeledDataset, RewardTuple, Side};
use crate::model::loss::{grad_label_l1, grad_preference, loss_label_l1, loss_preference};
use crate::model::RewardModel;
use crate::pref::PreferenceDataset;

/// Which objective a training run minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// L1 distance to scalar labels.
    LabelL1,
    /// Link-loss on predicted preference gaps.
    PreferenceF,
}

/// Plain full-batch gradient descent; no adaptive state, so two runs from
/// the same initialization follow identical trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub objective: Objective,
    pub link_loss: LinkLoss,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 200,
            objective: Objective::PreferenceF,
            link_loss: LinkLoss::SigmoidNll,
            seed: 0,
        }
    }
}

/// Training data matching the objective.
pub enum TrainData<'a> {
    Labeled(&'a RewardLabeledDataset),
    Preference(&'a PreferenceDataset),
}

/// Loss before each step plus the final loss; `losses[0]` is the initial
/// loss, `losses.last()` the final one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub losses: Vec<f64>,
}

pub fn train(
    model: &RewardModel,
    data: &TrainData<'_>,
    config: &TrainConfig,
) -> Result<(RewardModel, TrainLog)> {
    if !(config.learning_rate > 0.0) {
        return Err(Error::param("learning rate must be positive"));
    }
    match (config.objective, data) {
        (Objective::LabelL1, TrainData::Labeled(_)) => {}
        (Objective::PreferenceF, TrainData::Preference(_)) => {}
        _ => return Err(Error::param("objective does not match the provided data kind")),
    }

    let eval = |m: &RewardModel| -> Result<f64> {
        match data {
            TrainData::Labeled(d) => Ok(loss_label_l1(m, d)),
            TrainData::Preference(d) => loss_preference(m, d, &config.link_loss),
        }
    };
    let gradient = |m: &RewardModel| -> Result<Vec<f64>> {
        match data {
            TrainData::Labeled(d) => Ok(grad_label_l1(m, d)),
            TrainData::Preference(d) => grad_preference(m, d, &config.link_loss),
        }
    };

    let mut current = model.clone();
    let mut losses = Vec::with_capacity(config.epochs + 1);
    losses.push(eval(&current)?);
    for epoch in 0..config.epochs {
        let g = gradient(&current)?;
        let mut w = current.weights().to_vec();
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= config.learning_rate * gi;
        }
        current.set_weights(w)?;
        let loss = eval(&current)?;
        if !loss.is_finite() {
            return Err(Error::Diverged { step: epoch + 1, msg: format!("loss became {loss}") });
        }
        losses.push(loss);
    }
    Ok((current, TrainLog { losses }))
}

/// Label every step of the dataset with the model's predicted reward,
/// preserving provenance. Sides follow the majority preference of each
/// pair's labels (ties prefer `clip_1`).
pub fn label_with_model(
    model: &RewardModel,
    dataset: &PreferenceDataset,
) -> Result<RewardLabeledDataset> {
    let mut tuples = Vec::with_capacity(dataset.len() * 2 * dataset.clip_length());
    let mut provenance = Vec::with_capacity(tuples.capacity());
    for pair in dataset.pairs() {
        let (n1, n2) = pair.label_counts();
        let first_chosen = n1 >= n2;
        for (clip, is_chosen) in [(&pair.clip_1, first_chosen), (&pair.clip_2, !first_chosen)] {
            let side = if is_chosen { Side::Chosen } else { Side::Rejected };
            for (t, step) in clip.steps.iter().enumerate() {
                tuples.push(RewardTuple {
                    state: step.state,
                    action: step.action,
                    reward: model.predict(step.state, step.action),
                    next_state: step.next_state,
                });
                provenance.push(Provenance { pair_id: pair.pair_id, side, t });
            }
        }
    }
    RewardLabeledDataset::new(tuples, provenance, LabelingMeta::for_method(LabelMethod::Model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{binary_label, reward_gap};
    use crate::model::FeatureMap;
    use crate::pref::synthetic;

    #[test]
    fn zero_epochs_leaves_the_model_unchanged() {
        let ds = synthetic::no_overlap_dataset(24, 4, 3, 3, 0).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let fm = FeatureMap::Tabular { states: 24, actions: 4 };
        let model = RewardModel::random(fm, 0.3, 1);
        let config = TrainConfig { epochs: 0, objective: Objective::LabelL1, ..TrainConfig::default() };
        let (trained, log) = train(&model, &TrainData::Labeled(&labeled), &config).unwrap();
        assert_eq!(trained, model);
        assert_eq!(log.losses.len(), 1);
    }

    #[test]
    fn l1_training_recovers_the_binary_sign_pattern() {
        let ds = synthetic::no_overlap_dataset(120, 4, 50, 1, 7).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let fm = FeatureMap::Tabular { states: 120, actions: 4 };
        let model = RewardModel::zeros(fm);
        let config = TrainConfig {
            learning_rate: 0.2,
            epochs: 120,
            objective: Objective::LabelL1,
            ..TrainConfig::default()
        };
        let (trained, log) = train(&model, &TrainData::Labeled(&labeled), &config).unwrap();
        assert!(log.losses.last().unwrap() <= log.losses.first().unwrap());
        let hits = labeled
            .tuples()
            .iter()
            .filter(|t| trained.predict(t.state, t.action).signum() == t.reward.signum())
            .count();
        let frac = hits as f64 / labeled.len() as f64;
        assert!(frac >= 0.95, "sign agreement {frac}");
    }

    #[test]
    fn preference_training_turns_gaps_positive() {
        let ds = synthetic::no_overlap_dataset(120, 4, 50, 1, 8).unwrap();
        let fm = FeatureMap::Tabular { states: 120, actions: 4 };
        let model = RewardModel::zeros(fm);
        let config = TrainConfig {
            learning_rate: 0.2,
            epochs: 150,
            objective: Objective::PreferenceF,
            ..TrainConfig::default()
        };
        let (trained, log) = train(&model, &TrainData::Preference(&ds), &config).unwrap();
        assert!(log.losses.last().unwrap() <= log.losses.first().unwrap());
        let positive = ds
            .pairs()
            .iter()
            .filter(|pair| {
                let gap = crate::model::loss::pair_gap(&trained, pair);
                let oriented = if pair.labels[0] == 1 { gap } else { -gap };
                oriented > 0.0
            })
            .count();
        let frac = positive as f64 / ds.len() as f64;
        assert!(frac >= 0.95, "positive-gap fraction {frac}");
    }

    #[test]
    fn zero_model_labels_give_zero_gap() {
        let ds = synthetic::no_overlap_dataset(48, 4, 8, 2, 9).unwrap();
        let model = RewardModel::zeros(FeatureMap::Tabular { states: 48, actions: 4 });
        let labeled = label_with_model(&model, &ds).unwrap();
        assert!(labeled.tuples().iter().all(|t| t.reward == 0.0));
        assert_eq!(reward_gap(&labeled).unwrap().gap, 0.0);
    }

    #[test]
    fn trained_model_labels_have_positive_gap_on_no_overlap_data() {
        let ds = synthetic::no_overlap_dataset(120, 4, 40, 1, 10).unwrap();
        let fm = FeatureMap::Tabular { states: 120, actions: 4 };
        let config = TrainConfig {
            learning_rate: 0.2,
            epochs: 150,
            objective: Objective::PreferenceF,
            ..TrainConfig::default()
        };
        let (trained, _) = train(&RewardModel::zeros(fm), &TrainData::Preference(&ds), &config).unwrap();
        let labeled = label_with_model(&trained, &ds).unwrap();
        let gap = reward_gap(&labeled).unwrap().gap;
        assert!(gap > 0.0, "gap {gap}");
    }

    #[test]
    fn mismatched_objective_is_a_parameter_error() {
        let ds = synthetic::no_overlap_dataset(24, 4, 3, 3, 0).unwrap();
        let model = RewardModel::zeros(FeatureMap::Tabular { states: 24, actions: 4 });
        let config = TrainConfig { objective: Objective::LabelL1, ..TrainConfig::default() };
        assert!(train(&model, &TrainData::Preference(&ds), &config).is_err());
    }
}
