//! The four per-dataset objectives over one shared context, each exposed as
//! value + analytic gradient over a flat parameter vector.
//!
//! Over a reward model `w`: the L1 fit to binary labels and the link-loss
//! fit to preferences. Over a tabular Q (flattened): the Bellman fit to
//! binary labels and the link-loss fit to derived-reward gaps.

use crate::error::Result;
use crate::label::{binary_label, LinkLoss, RewardLabeledDataset};
use crate::learner::{bellman_label_grad, bellman_label_loss, preference_bellman_grad, preference_bellman_loss, QTable};
use crate::model::{grad_label_l1, grad_preference, loss_label_l1, loss_preference, FeatureMap, RewardModel};
use crate::pref::PreferenceDataset;

pub struct LossQuadruple {
    dataset: PreferenceDataset,
    labeled: RewardLabeledDataset,
    feature_map: FeatureMap,
    state_count: usize,
    action_count: usize,
    discount: f64,
    link_loss: LinkLoss,
}

impl LossQuadruple {
    pub fn new(
        dataset: PreferenceDataset,
        feature_map: FeatureMap,
        state_count: usize,
        action_count: usize,
        discount: f64,
        link_loss: LinkLoss,
    ) -> Result<Self> {
        let labeled = binary_label(&dataset)?;
        Ok(LossQuadruple {
            dataset,
            labeled,
            feature_map,
            state_count,
            action_count,
            discount,
            link_loss,
        })
    }

    pub fn dataset(&self) -> &PreferenceDataset {
        &self.dataset
    }

    pub fn labeled(&self) -> &RewardLabeledDataset {
        &self.labeled
    }

    pub fn link_loss(&self) -> &LinkLoss {
        &self.link_loss
    }

    pub fn model_dim(&self) -> usize {
        self.feature_map.dim()
    }

    pub fn q_dim(&self) -> usize {
        self.state_count * self.action_count
    }

    fn model(&self, w: &[f64]) -> RewardModel {
        RewardModel::with_weights(self.feature_map, w.to_vec()).expect("dimension checked")
    }

    fn qtable(&self, q: &[f64]) -> QTable {
        QTable::from_flat(q, self.state_count, self.action_count, self.discount)
            .expect("dimension checked")
    }

    /// Binary-label reward loss.
    pub fn reward_label_loss(&self, w: &[f64]) -> f64 {
        loss_label_l1(&self.model(w), &self.labeled)
    }

    pub fn reward_label_grad(&self, w: &[f64]) -> Vec<f64> {
        grad_label_l1(&self.model(w), &self.labeled)
    }

    /// Preference reward loss.
    pub fn reward_pref_loss(&self, w: &[f64]) -> f64 {
        loss_preference(&self.model(w), &self.dataset, &self.link_loss).expect("non-empty dataset")
    }

    pub fn reward_pref_grad(&self, w: &[f64]) -> Vec<f64> {
        grad_preference(&self.model(w), &self.dataset, &self.link_loss).expect("non-empty dataset")
    }

    /// Binary-label Bellman loss.
    pub fn bellman_label_loss(&self, q: &[f64]) -> f64 {
        bellman_label_loss(&self.qtable(q), &self.labeled)
    }

    pub fn bellman_label_grad(&self, q: &[f64]) -> Vec<f64> {
        bellman_label_grad(&self.qtable(q), &self.labeled)
    }

    /// Preference Bellman loss.
    pub fn bellman_pref_loss(&self, q: &[f64]) -> f64 {
        preference_bellman_loss(&self.qtable(q), &self.dataset, &self.link_loss)
            .expect("non-empty dataset")
    }

    pub fn bellman_pref_grad(&self, q: &[f64]) -> Vec<f64> {
        preference_bellman_grad(&self.qtable(q), &self.dataset, &self.link_loss)
            .expect("non-empty dataset")
    }
}
