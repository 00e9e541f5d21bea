//! Reward-model training objectives and their analytic gradients.
//!
//! Two routes to the same goal: `loss_label_l1` fits scalar labels with an
//! L1 distance, `loss_preference` fits the preference signals through a
//! link-loss on the predicted return gap. With binary labels and a bounded
//! model they are tightly related; the verification module measures exactly
//! how.

use crate::error::{Error, Result};
use crate::label::{LinkLoss, RewardLabeledDataset};
use crate::model::RewardModel;
use crate::pref::{PreferenceDataset, PreferencePair};

/// `sum |r_model(s, a) - r|` over the labeled tuples.
pub fn loss_label_l1(model: &RewardModel, labeled: &RewardLabeledDataset) -> f64 {
    labeled
        .tuples()
        .iter()
        .map(|t| (model.predict(t.state, t.action) - t.reward).abs())
        .sum()
}

/// Subgradient of [`loss_label_l1`], with `sign(0) = 0` at the kink.
pub fn grad_label_l1(model: &RewardModel, labeled: &RewardLabeledDataset) -> Vec<f64> {
    let mut acc = vec![0.0; model.weights().len()];
    for t in labeled.tuples() {
        let diff = model.predict(t.state, t.action) - t.reward;
        let sign = if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        };
        if sign != 0.0 {
            model.add_grad(t.state, t.action, sign, &mut acc);
        }
    }
    acc
}

/// Predicted return gap of a pair: model return of `clip_1` minus `clip_2`.
pub fn pair_gap(model: &RewardModel, pair: &PreferencePair) -> f64 {
    let ret = |clip: &crate::env::TrajectoryClip| {
        clip.state_actions().map(|(s, a)| model.predict(s, a)).sum::<f64>()
    };
    ret(&pair.clip_1) - ret(&pair.clip_2)
}

/// `sum_i F(predicted gap oriented toward the preferred clip)`, with
/// multi-label pairs contributing one term per label (both orientations).
pub fn loss_preference(
    model: &RewardModel,
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::param("empty dataset"));
    }
    let mut total = 0.0;
    for pair in dataset.pairs() {
        let gap = pair_gap(model, pair);
        let (n1, n2) = pair.label_counts();
        total += n1 as f64 * link_loss.value(gap) + n2 as f64 * link_loss.value(-gap);
    }
    Ok(total)
}

/// Analytic gradient of [`loss_preference`].
pub fn grad_preference(
    model: &RewardModel,
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
) -> Result<Vec<f64>> {
    if dataset.is_empty() {
        return Err(Error::param("empty dataset"));
    }
    let mut acc = vec![0.0; model.weights().len()];
    for pair in dataset.pairs() {
        let gap = pair_gap(model, pair);
        let (n1, n2) = pair.label_counts();
        // d/dw [n1 F(gap) + n2 F(-gap)] with gap = sum_1 r - sum_2 r.
        let coef = n1 as f64 * link_loss.derivative(gap) - n2 as f64 * link_loss.derivative(-gap);
        if coef == 0.0 {
            continue;
        }
        for (s, a) in pair.clip_1.state_actions() {
            model.add_grad(s, a, coef, &mut acc);
        }
        for (s, a) in pair.clip_2.state_actions() {
            model.add_grad(s, a, -coef, &mut acc);
        }
    }
    Ok(acc)
}

/// The linear rewrite of the binary-label L1 loss: with every model output
/// in `(-1, 1)` and labels exactly +-1, `sum |r_model - r|` equals
/// `2 T N - (sum_chosen r_model - sum_rejected r_model)`.
pub fn label_l1_linear_form(model: &RewardModel, labeled: &RewardLabeledDataset) -> f64 {
    let mut signed = 0.0;
    for (t, prov) in labeled.iter() {
        let r = model.predict(t.state, t.action);
        match prov.side {
            crate::label::Side::Chosen => signed += r,
            crate::label::Side::Rejected => signed -= r,
        }
    }
    labeled.len() as f64 - signed
}
