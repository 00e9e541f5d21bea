use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::env::TrajectoryClip;
use crate::error::{Error, Result};
use crate::pref::LinkFunction;

/// A compared pair of clips with one or more Bernoulli preference labels.
/// Label `1` prefers `clip_1`, label `2` prefers `clip_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub pair_id: u64,
    pub clip_1: TrajectoryClip,
    pub clip_2: TrajectoryClip,
    pub labels: Vec<u8>,
}

impl PreferencePair {
    /// `(chosen, rejected)` clips for a single-label pair.
    pub fn chosen_rejected(&self) -> Result<(&TrajectoryClip, &TrajectoryClip)> {
        if self.labels.len() != 1 {
            return Err(Error::validation(format!(
                "pair {} carries {} labels; a single label is required",
                self.pair_id,
                self.labels.len()
            )));
        }
        Ok(match self.labels[0] {
            1 => (&self.clip_1, &self.clip_2),
            _ => (&self.clip_2, &self.clip_1),
        })
    }

    /// Counts of labels preferring `clip_1` and `clip_2` respectively.
    pub fn label_counts(&self) -> (usize, usize) {
        let first = self.labels.iter().filter(|&&l| l == 1).count();
        (first, self.labels.len() - first)
    }
}

/// A preference dataset: compared clip pairs, the clip length, the link
/// descriptor used at generation (metadata only), and a manifest counting
/// how often each clip was compared.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceDataset {
    pairs: Vec<PreferencePair>,
    clip_length: usize,
    link: LinkFunction,
    overlap_manifest: BTreeMap<u64, u32>,
}

impl PreferenceDataset {
    /// Validate pairs and derive the overlap manifest.
    ///
    /// Checks: clips match `clip_length`, labels are non-empty and in
    /// `{1, 2}`, and slots sharing a `clip_id` hold identical steps.
    pub fn new(
        pairs: Vec<PreferencePair>,
        clip_length: usize,
        link: LinkFunction,
    ) -> Result<Self> {
        link.validate()?;
        if clip_length == 0 {
            return Err(Error::param("clip length must be at least 1"));
        }
        let mut manifest = BTreeMap::new();
        let mut clip_content: HashMap<u64, &TrajectoryClip> = HashMap::new();
        let mut seen_pair_ids = HashSet::new();
        for pair in &pairs {
            if !seen_pair_ids.insert(pair.pair_id) {
                return Err(Error::validation(format!(
                    "duplicate pair_id {}",
                    pair.pair_id
                )));
            }
            if pair.labels.is_empty() {
                return Err(Error::validation(format!(
                    "pair {} has no labels",
                    pair.pair_id
                )));
            }
            if let Some(&bad) = pair.labels.iter().find(|&&l| l != 1 && l != 2) {
                return Err(Error::validation(format!(
                    "pair {} has invalid label {bad}; labels must be 1 or 2",
                    pair.pair_id
                )));
            }
            for clip in [&pair.clip_1, &pair.clip_2] {
                if clip.len() != clip_length {
                    return Err(Error::validation(format!(
                        "pair {}: clip {} has length {}, expected {clip_length}",
                        pair.pair_id,
                        clip.clip_id,
                        clip.len()
                    )));
                }
                crate::env::validate_chain(&clip.steps)?;
                match clip_content.get(&clip.clip_id) {
                    Some(existing) if existing.steps != clip.steps => {
                        return Err(Error::validation(format!(
                            "clip id {} reused with different contents",
                            clip.clip_id
                        )));
                    }
                    _ => {
                        clip_content.insert(clip.clip_id, clip);
                    }
                }
                *manifest.entry(clip.clip_id).or_insert(0) += 1;
            }
        }
        Ok(PreferenceDataset {
            pairs,
            clip_length,
            link,
            overlap_manifest: manifest,
        })
    }

    pub fn pairs(&self) -> &[PreferencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clip_length(&self) -> usize {
        self.clip_length
    }

    pub fn link(&self) -> LinkFunction {
        self.link
    }

    /// Clip id -> number of comparisons it participates in.
    pub fn overlap_manifest(&self) -> &BTreeMap<u64, u32> {
        &self.overlap_manifest
    }

    /// True when every pair carries exactly one label.
    pub fn is_single_label(&self) -> bool {
        self.pairs.iter().all(|p| p.labels.len() == 1)
    }

    /// Exhaustive scan: does any `(state, action)` occur twice anywhere in
    /// the dataset?
    pub fn duplicate_state_action(&self) -> Option<(usize, usize)> {
        let mut seen = HashSet::new();
        for pair in &self.pairs {
            for clip in [&pair.clip_1, &pair.clip_2] {
                for sa in clip.state_actions() {
                    if !seen.insert(sa) {
                        return Some(sa);
                    }
                }
            }
        }
        None
    }

    /// True when every state-action pair in the dataset is unique.
    pub fn state_action_unique(&self) -> bool {
        self.duplicate_state_action().is_none()
    }

    /// All distinct state-action pairs, in first-occurrence order.
    pub fn distinct_state_actions(&self) -> Vec<(usize, usize)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for pair in &self.pairs {
            for clip in [&pair.clip_1, &pair.clip_2] {
                for sa in clip.state_actions() {
                    if seen.insert(sa) {
                        out.push(sa);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Step;

    fn clip(id: u64, sa: &[(usize, usize)]) -> TrajectoryClip {
        let steps: Vec<Step> = sa
            .iter()
            .enumerate()
            .map(|(t, &(s, a))| Step {
                state: s,
                action: a,
                next_state: sa.get(t + 1).map(|&(s2, _)| s2).unwrap_or(0),
            })
            .collect();
        TrajectoryClip::new(id, steps).unwrap()
    }

    fn pair(id: u64, c1: TrajectoryClip, c2: TrajectoryClip, labels: Vec<u8>) -> PreferencePair {
        PreferencePair { pair_id: id, clip_1: c1, clip_2: c2, labels }
    }

    #[test]
    fn manifest_counts_reuse() {
        let shared = clip(0, &[(0, 0), (1, 0)]);
        let pairs = vec![
            pair(0, shared.clone(), clip(1, &[(2, 0), (3, 0)]), vec![1]),
            pair(1, clip(2, &[(4, 0), (5, 0)]), shared.clone(), vec![2]),
        ];
        let ds = PreferenceDataset::new(pairs, 2, LinkFunction::Sigmoid).unwrap();
        assert_eq!(ds.overlap_manifest()[&0], 2);
        assert_eq!(ds.overlap_manifest()[&1], 1);
    }

    #[test]
    fn rejects_invalid_label_value() {
        let pairs = vec![pair(
            7,
            clip(0, &[(0, 0)]),
            clip(1, &[(1, 0)]),
            vec![3],
        )];
        let err = PreferenceDataset::new(pairs, 1, LinkFunction::Sigmoid).unwrap_err();
        assert!(err.to_string().contains("pair 7"));
    }

    #[test]
    fn rejects_clip_id_reuse_with_different_steps() {
        let pairs = vec![
            pair(0, clip(0, &[(0, 0)]), clip(1, &[(1, 0)]), vec![1]),
            pair(1, clip(0, &[(2, 0)]), clip(2, &[(3, 0)]), vec![1]),
        ];
        assert!(PreferenceDataset::new(pairs, 1, LinkFunction::Sigmoid).is_err());
    }

    #[test]
    fn duplicate_state_action_scan() {
        let pairs = vec![pair(
            0,
            clip(0, &[(0, 0), (1, 1)]),
            clip(1, &[(1, 1), (2, 0)]),
            vec![1],
        )];
        let ds = PreferenceDataset::new(pairs, 2, LinkFunction::Sigmoid).unwrap();
        assert_eq!(ds.duplicate_state_action(), Some((1, 1)));
        assert!(!ds.state_action_unique());
    }
}
