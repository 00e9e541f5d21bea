//! Synthetic preference-dataset generation from an MDP and behavior policy.
//!
//! Pipeline per pair: sample two trajectory clips from fresh rollouts, score
//! the preference probability `p = link(return(clip_1) - return(clip_2))`
//! with the MDP's true rewards, then draw the labels as Bernoulli trials.
//! Everything is a pure function of the inputs and the seed; each pair uses
//! a derived seed stream so pairs are independent.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{rollout_with, solve_optimal, Mdp, Policy, Step, TrajectoryClip};
use crate::error::{Error, Result};
use crate::pref::{LinkFunction, PreferenceDataset, PreferencePair};
use crate::rng::rng_for;

/// A behavior distribution over policies. Rollouts draw one component per
/// episode, mirroring how mixed-quality datasets are assembled.
#[derive(Debug, Clone)]
pub struct BehaviorPolicy {
    components: Vec<(Policy, f64)>,
}

impl BehaviorPolicy {
    pub fn single(policy: Policy) -> Self {
        BehaviorPolicy { components: vec![(policy, 1.0)] }
    }

    pub fn mixture(components: Vec<(Policy, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("mixture needs at least one component"));
        }
        let total: f64 = components.iter().map(|(_, w)| w).sum();
        if components.iter().any(|&(_, w)| w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("mixture weights must be non-negative and sum to 1"));
        }
        Ok(BehaviorPolicy { components })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> &Policy {
        if self.components.len() == 1 {
            return &self.components[0].0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (policy, w) in &self.components {
            acc += w;
            if u < acc {
                return policy;
            }
        }
        &self.components.last().unwrap().0
    }
}

impl From<Policy> for BehaviorPolicy {
    fn from(policy: Policy) -> Self {
        BehaviorPolicy::single(policy)
    }
}

/// Named behavior flavors: `medium` is epsilon-greedy(0.5) around the
/// optimum, `medium-expert` mixes the optimum with medium 50/50, and
/// `medium-replay` mixes epsilon in {0.2, 0.5, 0.8, 1.0} evenly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BehaviorPreset {
    Medium,
    MediumExpert,
    MediumReplay,
}

impl BehaviorPreset {
    pub fn build(&self, mdp: &Mdp) -> Result<BehaviorPolicy> {
        let optimal = solve_optimal(mdp, 1e-8)?;
        match self {
            BehaviorPreset::Medium => Ok(BehaviorPolicy::single(optimal.epsilon_greedy(0.5)?)),
            BehaviorPreset::MediumExpert => BehaviorPolicy::mixture(vec![
                (optimal.clone(), 0.5),
                (optimal.epsilon_greedy(0.5)?, 0.5),
            ]),
            BehaviorPreset::MediumReplay => {
                let mut parts = Vec::new();
                for eps in [0.2, 0.5, 0.8, 1.0] {
                    parts.push((optimal.epsilon_greedy(eps)?, 0.25));
                }
                BehaviorPolicy::mixture(parts)
            }
        }
    }
}

impl std::str::FromStr for BehaviorPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "medium" => Ok(BehaviorPreset::Medium),
            "medium-expert" => Ok(BehaviorPreset::MediumExpert),
            "medium-replay" => Ok(BehaviorPreset::MediumReplay),
            other => Err(Error::param(format!("unknown behavior preset '{other}'"))),
        }
    }
}

/// Knobs for clip sampling and the state-action uniqueness attempt.
#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Fail with [`Error::UniquenessExhausted`] instead of accepting a
    /// colliding clip once the retry budget runs out.
    pub require_unique: bool,
    /// Resampling attempts per clip before giving up on uniqueness.
    pub retry_budget: usize,
    /// Extra rollout steps beyond the clip length; the clip window start is
    /// drawn uniformly from the slack. Defaults to the clip length.
    pub rollout_slack: Option<usize>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { require_unique: false, retry_budget: 20, rollout_slack: None }
    }
}

/// Preference probability for two clips under the MDP's true rewards.
pub fn preference_probability(
    mdp: &Mdp,
    clip_1: &TrajectoryClip,
    clip_2: &TrajectoryClip,
    link: LinkFunction,
) -> f64 {
    link.eval(mdp.clip_return(&clip_1.steps) - mdp.clip_return(&clip_2.steps))
}

/// Sample one clip: roll out `clip_length + slack` steps and cut a window
/// whose start is uniform over the slack.
fn sample_clip_steps(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    clip_length: usize,
    slack: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Step> {
    let policy = behavior.sample(rng).clone();
    let steps = rollout_with(mdp, &policy, clip_length + slack, rng);
    let start = if slack == 0 { 0 } else { rng.random_range(0..=slack) };
    steps[start..start + clip_length].to_vec()
}

fn clip_collision(steps: &[Step], used: &HashSet<(usize, usize)>) -> Option<(usize, usize)> {
    let mut local = HashSet::new();
    for st in steps {
        let sa = (st.state, st.action);
        if used.contains(&sa) || !local.insert(sa) {
            return Some(sa);
        }
    }
    None
}

struct ClipSampler<'a> {
    mdp: &'a Mdp,
    behavior: &'a BehaviorPolicy,
    clip_length: usize,
    slack: usize,
    opts: &'a GenOptions,
    used: HashSet<(usize, usize)>,
    next_clip_id: u64,
}

impl<'a> ClipSampler<'a> {
    fn new(mdp: &'a Mdp, behavior: &'a BehaviorPolicy, clip_length: usize, opts: &'a GenOptions) -> Self {
        ClipSampler {
            mdp,
            behavior,
            clip_length,
            slack: opts.rollout_slack.unwrap_or(clip_length),
            opts,
            used: HashSet::new(),
            next_clip_id: 0,
        }
    }

    /// Sample a fresh clip, retrying while it collides with already-used
    /// state-actions. On budget exhaustion the colliding clip is either
    /// rejected (strict mode) or accepted with the overlap left visible to
    /// the dataset's uniqueness scan.
    fn sample(&mut self, rng: &mut ChaCha8Rng) -> Result<TrajectoryClip> {
        let mut steps = sample_clip_steps(self.mdp, self.behavior, self.clip_length, self.slack, rng);
        let mut collision = clip_collision(&steps, &self.used);
        let mut attempts = 0;
        while collision.is_some() && attempts < self.opts.retry_budget {
            steps = sample_clip_steps(self.mdp, self.behavior, self.clip_length, self.slack, rng);
            collision = clip_collision(&steps, &self.used);
            attempts += 1;
        }
        if let Some((state, action)) = collision {
            if self.opts.require_unique {
                return Err(Error::UniquenessExhausted { state, action });
            }
        }
        for st in &steps {
            self.used.insert((st.state, st.action));
        }
        let clip = TrajectoryClip::new(self.next_clip_id, steps)?;
        self.next_clip_id += 1;
        Ok(clip)
    }
}

fn draw_labels(p: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..count)
        .map(|_| if rng.random::<f64>() < p { 1 } else { 2 })
        .collect()
}

fn validate_common(n_pairs: usize, clip_length: usize, link: LinkFunction) -> Result<()> {
    if n_pairs == 0 {
        return Err(Error::param("n_pairs must be at least 1"));
    }
    if clip_length == 0 {
        return Err(Error::param("clip_length must be at least 1"));
    }
    link.validate()
}

/// Generate a dataset of independent pairs, one label each.
pub fn generate_dataset(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    n_pairs: usize,
    clip_length: usize,
    link: LinkFunction,
    seed: u64,
) -> Result<PreferenceDataset> {
    generate_multilabel_dataset_with(mdp, behavior, n_pairs, 1, clip_length, link, seed, &GenOptions::default())
}

/// [`generate_dataset`] with explicit sampling options.
pub fn generate_dataset_with(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    n_pairs: usize,
    clip_length: usize,
    link: LinkFunction,
    seed: u64,
    opts: &GenOptions,
) -> Result<PreferenceDataset> {
    generate_multilabel_dataset_with(mdp, behavior, n_pairs, 1, clip_length, link, seed, opts)
}

/// Generate a dataset where every pair carries `labels_per_pair` independent
/// Bernoulli labels with the pair's preference probability.
pub fn generate_multilabel_dataset(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    n_pairs: usize,
    labels_per_pair: usize,
    clip_length: usize,
    link: LinkFunction,
    seed: u64,
) -> Result<PreferenceDataset> {
    generate_multilabel_dataset_with(
        mdp,
        behavior,
        n_pairs,
        labels_per_pair,
        clip_length,
        link,
        seed,
        &GenOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn generate_multilabel_dataset_with(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    n_pairs: usize,
    labels_per_pair: usize,
    clip_length: usize,
    link: LinkFunction,
    seed: u64,
    opts: &GenOptions,
) -> Result<PreferenceDataset> {
    validate_common(n_pairs, clip_length, link)?;
    if labels_per_pair == 0 {
        return Err(Error::param("labels_per_pair must be at least 1"));
    }
    let mut sampler = ClipSampler::new(mdp, behavior, clip_length, opts);
    let mut pairs = Vec::with_capacity(n_pairs);
    for pair_idx in 0..n_pairs {
        // One derived stream per pair: clip sampling, then the label draws.
        let mut rng = rng_for(seed, pair_idx as u64);
        let clip_1 = sampler.sample(&mut rng)?;
        let clip_2 = sampler.sample(&mut rng)?;
        let p = preference_probability(mdp, &clip_1, &clip_2, link);
        let labels = draw_labels(p, labels_per_pair, &mut rng);
        pairs.push(PreferencePair { pair_id: pair_idx as u64, clip_1, clip_2, labels });
    }
    PreferenceDataset::new(pairs, clip_length, link)
}

/// Generate a dataset with structured clip reuse: a `reuse_fraction` of a
/// `pool_size`-comparison budget is served by hub clips, each compared
/// against `reuse_multiplier` distinct fresh partners; the remaining
/// comparisons pair fresh clips. The hub lands on a random side of each of
/// its pairs. `pool_size` is therefore the total number of pairs, and the
/// fraction of pairs containing a multiply-compared clip is
/// `reuse_fraction * reuse_multiplier`.
#[allow(clippy::too_many_arguments)]
pub fn generate_overlap_dataset(
    mdp: &Mdp,
    behavior: &BehaviorPolicy,
    pool_size: usize,
    reuse_fraction: f64,
    reuse_multiplier: usize,
    clip_length: usize,
    link: LinkFunction,
    seed: u64,
) -> Result<PreferenceDataset> {
    validate_common(pool_size, clip_length, link)?;
    if !(0.0..=1.0).contains(&reuse_fraction) {
        return Err(Error::param("reuse_fraction must lie in [0, 1]"));
    }
    if reuse_fraction > 0.0 && reuse_multiplier < 2 {
        return Err(Error::param("reuse_multiplier must be at least 2"));
    }
    let hubs = (reuse_fraction * pool_size as f64).round() as usize;
    let hub_pairs = hubs * reuse_multiplier;
    if hub_pairs > pool_size {
        return Err(Error::param(format!(
            "pool too small for requested structure: {hubs} hubs x{reuse_multiplier} needs \
             {hub_pairs} comparisons but pool_size is {pool_size}"
        )));
    }

    let opts = GenOptions::default();
    let mut sampler = ClipSampler::new(mdp, behavior, clip_length, &opts);

    // Hub clips first, each from its own seed stream.
    let mut hub_clips = Vec::with_capacity(hubs);
    for h in 0..hubs {
        let mut rng = rng_for(seed, 0x4855_4200 + h as u64);
        hub_clips.push(sampler.sample(&mut rng)?);
    }

    let mut pairs = Vec::with_capacity(pool_size);
    for pair_idx in 0..pool_size {
        let mut rng = rng_for(seed, pair_idx as u64);
        let (clip_1, clip_2) = if pair_idx < hub_pairs {
            let hub = hub_clips[pair_idx / reuse_multiplier].clone();
            let partner = sampler.sample(&mut rng)?;
            if rng.random::<bool>() {
                (hub, partner)
            } else {
                (partner, hub)
            }
        } else {
            let c1 = sampler.sample(&mut rng)?;
            let c2 = sampler.sample(&mut rng)?;
            (c1, c2)
        };
        let p = preference_probability(mdp, &clip_1, &clip_2, link);
        let labels = draw_labels(p, 1, &mut rng);
        pairs.push(PreferencePair { pair_id: pair_idx as u64, clip_1, clip_2, labels });
    }
    PreferenceDataset::new(pairs, clip_length, link)
}
