//! Reward labeling: converting preference datasets into scalar-reward
//! datasets, plus the exact label search and the reward-gap diagnostic.

mod binary;
mod gap;
mod io;
mod linkloss;
mod multilabel;
mod optimal;
mod types;

pub use binary::binary_label;
pub use gap::reward_gap;
pub use io::{load_labeled, save_labeled};
pub use linkloss::{LinkLoss, LossKind};
pub use multilabel::{multilabel_label, multilabel_pair_objective};
pub use optimal::{label_loss, solve_optimal_labels, OptimalLabelConfig, OptimalLabels};
pub(crate) use optimal::compile as compile_pair_coefficients;
pub use types::{
    LabelMethod, LabelingMeta, Provenance, RewardGapReport, RewardLabeledDataset, RewardTuple, Side,
};
