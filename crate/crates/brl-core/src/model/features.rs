use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::rng_for;

/// State-action feature embedding for parametric reward models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    /// One-hot over state-action pairs; fully expressive on tabular MDPs.
    Tabular { states: usize, actions: usize },
    /// `[1, x, y, one-hot(action)]` for grid layouts; low-dimensional, so
    /// the model must generalize across cells.
    Coords { width: usize, height: usize, actions: usize },
    /// Fixed pseudorandom features, deterministic in the seed; used by the
    /// verification suite to exercise arbitrary parameter counts.
    Random { states: usize, actions: usize, dim: usize, seed: u64 },
}

impl FeatureMap {
    pub fn dim(&self) -> usize {
        match *self {
            FeatureMap::Tabular { states, actions } => states * actions,
            FeatureMap::Coords { actions, .. } => 3 + actions,
            FeatureMap::Random { dim, .. } => dim,
        }
    }

    pub fn features(&self, state: usize, action: usize) -> Vec<f64> {
        match *self {
            FeatureMap::Tabular { states, actions } => {
                debug_assert!(state < states && action < actions);
                let mut v = vec![0.0; states * actions];
                v[state * actions + action] = 1.0;
                v
            }
            FeatureMap::Coords { width, height, actions } => {
                let x = (state % width) as f64 / (width.max(2) - 1) as f64;
                let y = (state / width) as f64 / (height.max(2) - 1) as f64;
                let mut v = Vec::with_capacity(3 + actions);
                v.push(1.0);
                v.push(x);
                v.push(y);
                for a in 0..actions {
                    v.push(if a == action { 1.0 } else { 0.0 });
                }
                v
            }
            FeatureMap::Random { actions, dim, seed, .. } => {
                let mut rng = rng_for(seed, (state * actions + action) as u64);
                (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabular_features_index_correctly() {
        let f = FeatureMap::Tabular { states: 3, actions: 2 };
        let v = f.features(2, 1);
        assert_eq!(v.len(), 6);
        assert_eq!(v[5], 1.0);
        assert_eq!(v.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn random_features_are_stable() {
        let f = FeatureMap::Random { states: 4, actions: 2, dim: 5, seed: 3 };
        assert_eq!(f.features(1, 1), f.features(1, 1));
        assert_ne!(f.features(1, 1), f.features(2, 0));
    }
}
