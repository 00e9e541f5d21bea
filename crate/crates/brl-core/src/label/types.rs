use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of a comparison a tuple came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Chosen,
    Rejected,
}

/// One reward-labeled transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardTuple {
    #[serde(rename = "s")]
    pub state: usize,
    #[serde(rename = "a")]
    pub action: usize,
    #[serde(rename = "r")]
    pub reward: f64,
    #[serde(rename = "s2")]
    pub next_state: usize,
}

/// Origin of a tuple: the pair it came from, the side within the pair, and
/// the step index inside the clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub pair_id: u64,
    pub side: Side,
    pub t: usize,
}

/// How a labeled dataset was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMethod {
    Binary,
    Multilabel,
    Model,
    OptimalSearch,
    TrueReward,
    External,
}

/// Diagnostics attached by the labelers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingMeta {
    pub method: LabelMethod,
    /// Pairs whose empirical preference probability hit the clamp.
    pub clamped_pairs: usize,
    /// Pairs whose target return gap was clipped to the `[-2T, 2T]` bound.
    pub saturated_pairs: usize,
}

impl LabelingMeta {
    pub fn for_method(method: LabelMethod) -> Self {
        LabelingMeta { method, clamped_pairs: 0, saturated_pairs: 0 }
    }
}

/// Flat `(state, action, reward, next_state)` tuples with per-tuple
/// provenance, consumable by any reward-based offline learner.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardLabeledDataset {
    tuples: Vec<RewardTuple>,
    provenance: Vec<Provenance>,
    meta: LabelingMeta,
}

impl RewardLabeledDataset {
    /// Build and validate: rewards in `[-1, 1]` and provenance aligned
    /// one-to-one with tuples.
    pub fn new(
        tuples: Vec<RewardTuple>,
        provenance: Vec<Provenance>,
        meta: LabelingMeta,
    ) -> Result<Self> {
        if tuples.len() != provenance.len() {
            return Err(Error::validation(format!(
                "{} tuples but {} provenance entries",
                tuples.len(),
                provenance.len()
            )));
        }
        for (i, t) in tuples.iter().enumerate() {
            if !(-1.0..=1.0).contains(&t.reward) || !t.reward.is_finite() {
                return Err(Error::validation(format!(
                    "tuple {i} reward {} lies outside [-1, 1]",
                    t.reward
                )));
            }
        }
        Ok(RewardLabeledDataset { tuples, provenance, meta })
    }

    pub fn tuples(&self) -> &[RewardTuple] {
        &self.tuples
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn meta(&self) -> LabelingMeta {
        self.meta
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RewardTuple, &Provenance)> {
        self.tuples.iter().zip(self.provenance.iter())
    }

    /// Mean reward per distinct state-action: the value an averaging
    /// learner effectively sees for repeated state-actions.
    pub fn mean_reward_by_state_action(&self) -> HashMap<(usize, usize), f64> {
        let mut sums: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
        for t in &self.tuples {
            let e = sums.entry((t.state, t.action)).or_insert((0.0, 0));
            e.0 += t.reward;
            e.1 += 1;
        }
        sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
    }

    /// Replace every reward via `f(state, action)`, keeping provenance.
    /// Used by the oracle path to substitute true environment rewards.
    pub fn relabel(&self, mut f: impl FnMut(usize, usize) -> f64, method: LabelMethod) -> Result<Self> {
        let tuples = self
            .tuples
            .iter()
            .map(|t| RewardTuple { reward: f(t.state, t.action), ..*t })
            .collect();
        RewardLabeledDataset::new(tuples, self.provenance.clone(), LabelingMeta::for_method(method))
    }
}

/// Mean labeled reward over chosen-side occurrences minus the mean over
/// rejected-side occurrences, computed on the per-state-action mean rewards
/// (so a state-action that appears on both sides contributes its averaged
/// label to each occurrence).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardGapReport {
    pub mean_chosen: f64,
    pub mean_rejected: f64,
    pub gap: f64,
}
