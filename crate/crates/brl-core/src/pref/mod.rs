//! Preference datasets: link functions, generation from behavior policies,
//! structured-overlap and multi-label variants, and JSON-Lines storage.

mod generate;
mod io;
mod link;
pub mod synthetic;
mod types;

pub use generate::{
    generate_dataset, generate_dataset_with, generate_multilabel_dataset,
    generate_multilabel_dataset_with, generate_overlap_dataset, preference_probability,
    BehaviorPolicy, BehaviorPreset, GenOptions,
};
pub use io::{load_dataset, save_dataset, DATASET_FORMAT_VERSION};
pub use link::{sigmoid, LinkFunction};
pub use types::{PreferenceDataset, PreferencePair};
