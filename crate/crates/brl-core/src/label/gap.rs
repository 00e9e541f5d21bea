//! Reward-gap diagnostic: how far apart the labeled rewards of chosen and
//! rejected occurrences sit.

use crate::error::{Error, Result};
use crate::label::types::{RewardGapReport, RewardLabeledDataset, Side};

/// Mean effective reward over chosen-side occurrences minus the mean over
/// rejected-side occurrences.
///
/// The effective reward of a state-action is the mean of all its labels in
/// the dataset, which is what an averaging learner consumes. Overlap-free
/// binary labels therefore score a gap of exactly 2; any state-action that
/// lands on both sides pulls the gap below 2.
pub fn reward_gap(labeled: &RewardLabeledDataset) -> Result<RewardGapReport> {
    let means = labeled.mean_reward_by_state_action();
    let mut sums = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (tuple, prov) in labeled.iter() {
        let idx = match prov.side {
            Side::Chosen => 0,
            Side::Rejected => 1,
        };
        sums[idx] += means[&(tuple.state, tuple.action)];
        counts[idx] += 1;
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::validation(
            "reward gap needs tuples on both the chosen and rejected side",
        ));
    }
    let mean_chosen = sums[0] / counts[0] as f64;
    let mean_rejected = sums[1] / counts[1] as f64;
    Ok(RewardGapReport { mean_chosen, mean_rejected, gap: mean_chosen - mean_rejected })
}
