//! Reward labels from repeated preference signals on the same pair.
//!
//! Each pair's labels give an empirical preference probability; the label
//! vector realizing that probability with minimal L2 norm spreads the
//! required return gap uniformly across the steps of both clips.

use crate::error::{Error, Result};
use crate::label::types::{LabelMethod, LabelingMeta, Provenance, RewardLabeledDataset, RewardTuple, Side};
use crate::pref::{LinkFunction, PreferenceDataset};

/// Convert a (possibly multi-label) dataset into reward labels.
///
/// Per pair with `k` labels: the empirical probability `p = (#labels==1)/k`
/// is clamped into `[delta, 1 - delta]` with `delta = 1/(2k)` so the link
/// inverse stays finite, the target return gap is `link^-1(p)` clipped to
/// `[-2T, 2T]` (clipping is flagged as saturation), and with L2
/// regularization `lambda * ||r||^2` the unique minimizer assigns
/// `+gap/(2T)` to every `clip_1` step and `-gap/(2T)` to every `clip_2`
/// step. Note the clamp makes a single label (`k = 1`) uninformative
/// (`p` clamps to 1/2, so all labels are zero); single-label datasets
/// belong to [`binary_label`](crate::label::binary_label).
pub fn multilabel_label(
    dataset: &PreferenceDataset,
    link: LinkFunction,
    regularization: f64,
) -> Result<RewardLabeledDataset> {
    if !(regularization > 0.0) || !regularization.is_finite() {
        return Err(Error::param("regularization must be positive and finite"));
    }
    link.validate()?;
    let t_len = dataset.clip_length() as f64;
    let max_gap = 2.0 * t_len;
    let mut tuples = Vec::with_capacity(dataset.len() * 2 * dataset.clip_length());
    let mut provenance = Vec::with_capacity(tuples.capacity());
    let mut clamped_pairs = 0;
    let mut saturated_pairs = 0;
    for pair in dataset.pairs() {
        let k = pair.labels.len();
        let (first, _) = pair.label_counts();
        let p_hat = first as f64 / k as f64;
        let delta = 1.0 / (2.0 * k as f64);
        let p_clamped = p_hat.clamp(delta, 1.0 - delta);
        if p_clamped != p_hat {
            clamped_pairs += 1;
        }
        let raw_gap = link.inverse(p_clamped)?;
        let gap = raw_gap.clamp(-max_gap, max_gap);
        if gap != raw_gap {
            saturated_pairs += 1;
        }
        let per_step = gap / max_gap;
        for (clip, sign) in [(&pair.clip_1, 1.0), (&pair.clip_2, -1.0)] {
            // Side bookkeeping follows the majority preference.
            let side = if (sign > 0.0) == (p_hat >= 0.5) {
                Side::Chosen
            } else {
                Side::Rejected
            };
            for (t, step) in clip.steps.iter().enumerate() {
                tuples.push(RewardTuple {
                    state: step.state,
                    action: step.action,
                    reward: (sign * per_step).clamp(-1.0, 1.0),
                    next_state: step.next_state,
                });
                provenance.push(Provenance { pair_id: pair.pair_id, side, t });
            }
        }
    }
    RewardLabeledDataset::new(
        tuples,
        provenance,
        LabelingMeta { method: LabelMethod::Multilabel, clamped_pairs, saturated_pairs },
    )
}

/// The regularized objective the closed form minimizes for one pair:
/// `|p_target - link(sum r_1 - sum r_2)| + lambda * ||r||^2`, with the first
/// `T` entries of `r` belonging to `clip_1` and the rest to `clip_2`.
pub fn multilabel_pair_objective(
    p_target: f64,
    link: LinkFunction,
    lambda: f64,
    clip_len: usize,
    r: &[f64],
) -> f64 {
    assert_eq!(r.len(), 2 * clip_len);
    let gap: f64 =
        r[..clip_len].iter().sum::<f64>() - r[clip_len..].iter().sum::<f64>();
    (p_target - link.eval(gap)).abs() + lambda * r.iter().map(|v| v * v).sum::<f64>()
}
