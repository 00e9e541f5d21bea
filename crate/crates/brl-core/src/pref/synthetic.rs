//! Hand-constructed datasets over an abstract state-action space.
//!
//! These builders do not consult an MDP: clips are chained walks and the
//! labels are uniform coin flips. They exist to probe the labeling and
//! learning objectives on controlled structures - in particular datasets
//! whose state-action pairs are globally unique, which rollout-based
//! generation cannot guarantee on small environments.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Step, TrajectoryClip};
use crate::error::{Error, Result};
use crate::pref::{LinkFunction, PreferenceDataset, PreferencePair};
use crate::rng::rng_for;

fn random_label(rng: &mut ChaCha8Rng) -> u8 {
    if rng.random::<bool>() {
        1
    } else {
        2
    }
}

/// Build a dataset in which every `(state, action)` occurs exactly once.
///
/// Requires `2 * n_pairs * clip_length <= state_count * action_count`.
pub fn no_overlap_dataset(
    state_count: usize,
    action_count: usize,
    n_pairs: usize,
    clip_length: usize,
    seed: u64,
) -> Result<PreferenceDataset> {
    if n_pairs == 0 || clip_length == 0 {
        return Err(Error::param("n_pairs and clip_length must be at least 1"));
    }
    let needed = 2 * n_pairs * clip_length;
    if needed > state_count * action_count {
        return Err(Error::param(format!(
            "cannot place {needed} unique state-actions in a {state_count}x{action_count} space"
        )));
    }
    let mut rng = rng_for(seed, 0x51);
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let build_clip = |clip_id: u64, rng: &mut ChaCha8Rng, used: &mut HashSet<(usize, usize)>| -> Result<TrajectoryClip> {
        'attempt: for _ in 0..200 {
            let mut local: Vec<(usize, usize)> = Vec::with_capacity(clip_length);
            let is_free = |s: usize, used: &HashSet<(usize, usize)>, local: &[(usize, usize)]| {
                (0..action_count)
                    .any(|a| !used.contains(&(s, a)) && !local.contains(&(s, a)))
            };
            let open_states: Vec<usize> =
                (0..state_count).filter(|&s| is_free(s, used, &local)).collect();
            let Some(&start) = open_states.as_slice().choose(rng) else {
                continue 'attempt;
            };
            let mut state = start;
            let mut steps = Vec::with_capacity(clip_length);
            for t in 0..clip_length {
                let avail: Vec<usize> = (0..action_count)
                    .filter(|&a| !used.contains(&(state, a)) && !local.contains(&(state, a)))
                    .collect();
                let Some(&action) = avail.as_slice().choose(rng) else {
                    continue 'attempt;
                };
                local.push((state, action));
                let next = if t + 1 < clip_length {
                    let candidates: Vec<usize> =
                        (0..state_count).filter(|&s| is_free(s, used, &local)).collect();
                    match candidates.as_slice().choose(rng) {
                        Some(&s) => s,
                        None => continue 'attempt,
                    }
                } else {
                    rng.random_range(0..state_count)
                };
                steps.push(Step { state, action, next_state: next });
                state = next;
            }
            used.extend(local);
            return TrajectoryClip::new(clip_id, steps);
        }
        Err(Error::Internal(
            "failed to place a unique clip; the space is too congested".into(),
        ))
    };

    let mut pairs = Vec::with_capacity(n_pairs);
    for i in 0..n_pairs {
        let clip_1 = build_clip(2 * i as u64, &mut rng, &mut used)?;
        let clip_2 = build_clip(2 * i as u64 + 1, &mut rng, &mut used)?;
        let labels = vec![random_label(&mut rng)];
        pairs.push(PreferencePair { pair_id: i as u64, clip_1, clip_2, labels });
    }
    PreferenceDataset::new(pairs, clip_length, LinkFunction::Sigmoid)
}

/// Build a dataset of unconstrained random-walk clips; state-actions may
/// repeat within and across clips.
pub fn random_dataset(
    state_count: usize,
    action_count: usize,
    n_pairs: usize,
    clip_length: usize,
    seed: u64,
) -> Result<PreferenceDataset> {
    if n_pairs == 0 || clip_length == 0 || state_count == 0 || action_count == 0 {
        return Err(Error::param("all dimensions must be at least 1"));
    }
    let mut rng = rng_for(seed, 0x52);
    let mut next_id = 0u64;
    let mut walk = |rng: &mut ChaCha8Rng| {
        let mut state = rng.random_range(0..state_count);
        let steps = (0..clip_length)
            .map(|_| {
                let action = rng.random_range(0..action_count);
                let next = rng.random_range(0..state_count);
                let step = Step { state, action, next_state: next };
                state = next;
                step
            })
            .collect();
        let clip = TrajectoryClip::new(next_id, steps).expect("walk always chains");
        next_id += 1;
        clip
    };
    let mut pairs = Vec::with_capacity(n_pairs);
    for i in 0..n_pairs {
        let clip_1 = walk(&mut rng);
        let clip_2 = walk(&mut rng);
        let labels = vec![random_label(&mut rng)];
        pairs.push(PreferencePair { pair_id: i as u64, clip_1, clip_2, labels });
    }
    PreferenceDataset::new(pairs, clip_length, LinkFunction::Sigmoid)
}
