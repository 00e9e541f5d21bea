//! Parametric bounded reward models: feature embeddings, tanh-squashed
//! linear models, the two training objectives, and full-batch training.

mod features;
pub mod loss;
mod reward_model;
mod train;

pub use features::FeatureMap;
pub use loss::{
    grad_label_l1, grad_preference, label_l1_linear_form, loss_label_l1, loss_preference, pair_gap,
};
pub use reward_model::RewardModel;
pub use train::{label_with_model, train, Objective, TrainConfig, TrainData, TrainLog};
