//! Desk-scale offline preference-based reinforcement learning.
//!
//! The crate covers the full pipeline: tabular environments ([`env`]),
//! synthetic preference datasets ([`pref`]), reward labeling ([`label`]),
//! parametric reward models ([`model`]), offline learners ([`learner`]),
//! and numerical verification of the labeling/learning equivalences
//! ([`verify`]).

pub mod env;
pub mod error;
pub mod label;
pub mod learner;
pub mod model;
pub mod pref;
pub mod rng;
pub mod verify;

pub use env::{EvalReport, Mdp, Policy, Step, TrajectoryClip};
pub use error::{Error, Result};
pub use label::{LinkLoss, RewardGapReport, RewardLabeledDataset, RewardTuple, Side};
pub use model::{FeatureMap, RewardModel, TrainConfig};
pub use pref::{LinkFunction, PreferenceDataset, PreferencePair};
