use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureMap;
use crate::rng::rng_for;

/// Differentiable bounded reward function `r(s, a) = tanh(w . phi(s, a))`.
///
/// The tanh squashing keeps outputs strictly inside `(-1, 1)`, which is what
/// lets the L1 loss against binary labels open its absolute values into a
/// linear form.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardModel {
    feature_map: FeatureMap,
    weights: Vec<f64>,
}

/// Checkpoint schema: `{feature_map_kind, w}`.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    feature_map_kind: FeatureMap,
    w: Vec<f64>,
}

impl RewardModel {
    /// Zero-initialized model (outputs identically 0).
    pub fn zeros(feature_map: FeatureMap) -> Self {
        let dim = feature_map.dim();
        RewardModel { feature_map, weights: vec![0.0; dim] }
    }

    pub fn with_weights(feature_map: FeatureMap, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != feature_map.dim() {
            return Err(Error::param(format!(
                "weight vector has length {}, feature map needs {}",
                weights.len(),
                feature_map.dim()
            )));
        }
        Ok(RewardModel { feature_map, weights })
    }

    /// Weights drawn uniformly from `[-scale, scale]`.
    pub fn random(feature_map: FeatureMap, scale: f64, seed: u64) -> Self {
        let mut rng = rng_for(seed, 0x57);
        let weights = (0..feature_map.dim()).map(|_| rng.random_range(-scale..=scale)).collect();
        RewardModel { feature_map, weights }
    }

    pub fn feature_map(&self) -> FeatureMap {
        self.feature_map
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.feature_map.dim() {
            return Err(Error::param("weight length mismatch"));
        }
        self.weights = weights;
        Ok(())
    }

    pub fn pre_activation(&self, state: usize, action: usize) -> f64 {
        // One-hot features reduce to a single lookup.
        if let FeatureMap::Tabular { actions, .. } = self.feature_map {
            return self.weights[state * actions + action];
        }
        self.feature_map
            .features(state, action)
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| f * w)
            .sum()
    }

    /// Predicted reward in `(-1, 1)`.
    pub fn predict(&self, state: usize, action: usize) -> f64 {
        self.pre_activation(state, action).tanh()
    }

    /// Analytic gradient of the prediction with respect to the weights:
    /// `(1 - tanh^2(z)) * phi`.
    pub fn grad(&self, state: usize, action: usize) -> Vec<f64> {
        let z = self.pre_activation(state, action);
        let scale = 1.0 - z.tanh().powi(2);
        self.feature_map
            .features(state, action)
            .into_iter()
            .map(|f| scale * f)
            .collect()
    }

    /// Accumulate `coef * dpredict/dw` into `acc` without allocating.
    pub(crate) fn add_grad(&self, state: usize, action: usize, coef: f64, acc: &mut [f64]) {
        let z = self.pre_activation(state, action);
        let scale = coef * (1.0 - z.tanh().powi(2));
        if let FeatureMap::Tabular { actions, .. } = self.feature_map {
            acc[state * actions + action] += scale;
            return;
        }
        for (g, f) in acc.iter_mut().zip(self.feature_map.features(state, action)) {
            *g += scale * f;
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let cp = Checkpoint { feature_map_kind: self.feature_map, w: self.weights.clone() };
        fs::write(path, serde_json::to_string(&cp)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
        RewardModel::with_weights(cp.feature_map_kind, cp.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outputs_stay_inside_the_open_interval() {
        // tanh saturates to exactly 1.0 in f64 beyond |z| ~ 18.7; within
        // that range the output is strictly inside (-1, 1).
        let fm = FeatureMap::Tabular { states: 2, actions: 2 };
        let model = RewardModel::with_weights(fm, vec![15.0, -15.0, 0.0, 3.0]).unwrap();
        for s in 0..2 {
            for a in 0..2 {
                let r = model.predict(s, a);
                assert!(r > -1.0 && r < 1.0);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let fm = FeatureMap::Random { states: 3, actions: 2, dim: 4, seed: 1 };
        let model = RewardModel::random(fm, 0.5, 2);
        let h = 1e-6;
        for (s, a) in [(0, 0), (1, 1), (2, 0)] {
            let analytic = model.grad(s, a);
            for j in 0..4 {
                let mut wp = model.weights().to_vec();
                wp[j] += h;
                let mut wm = model.weights().to_vec();
                wm[j] -= h;
                let fp = RewardModel::with_weights(fm, wp).unwrap().predict(s, a);
                let fm_ = RewardModel::with_weights(fm, wm).unwrap().predict(s, a);
                let fd = (fp - fm_) / (2.0 * h);
                assert!((analytic[j] - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let fm = FeatureMap::Coords { width: 3, height: 3, actions: 4 };
        let model = RewardModel::random(fm, 1.0, 5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        assert_eq!(RewardModel::load(&path).unwrap(), model);
    }
}
