use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monotonically increasing map from a return difference to a preference
/// probability in `[0, 1]`.
///
/// `Sigmoid` is the Bradley-Terry choice. `Linear` applies
/// `slope * x + offset` and clamps the result into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "link_kind", rename_all = "snake_case")]
pub enum LinkFunction {
    Sigmoid,
    Linear { slope: f64, offset: f64 },
}

impl LinkFunction {
    pub fn linear(slope: f64, offset: f64) -> Result<Self> {
        if !(slope > 0.0) {
            return Err(Error::param(format!(
                "linear link slope must be positive, got {slope}"
            )));
        }
        Ok(LinkFunction::Linear { slope, offset })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LinkFunction::Sigmoid => Ok(()),
            LinkFunction::Linear { slope, .. } if slope > 0.0 => Ok(()),
            LinkFunction::Linear { slope, .. } => Err(Error::param(format!(
                "linear link slope must be positive, got {slope}"
            ))),
        }
    }

    /// Preference probability for a return difference.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_flagged(x).0
    }

    /// Like [`eval`](Self::eval) but also reports whether a linear link had
    /// to clamp its output into `[0, 1]`.
    pub fn eval_flagged(&self, x: f64) -> (f64, bool) {
        match *self {
            LinkFunction::Sigmoid => (sigmoid(x), false),
            LinkFunction::Linear { slope, offset } => {
                let raw = slope * x + offset;
                (raw.clamp(0.0, 1.0), !(0.0..=1.0).contains(&raw))
            }
        }
    }

    /// Return difference producing probability `p`; the inverse of
    /// [`eval`](Self::eval) on the open interval `(0, 1)`.
    pub fn inverse(&self, p: f64) -> Result<f64> {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::param(format!("probability {p} outside (0, 1)")));
        }
        match *self {
            LinkFunction::Sigmoid => Ok((p / (1.0 - p)).ln()),
            LinkFunction::Linear { slope, offset } => Ok((p - offset) / slope),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_centered() {
        assert_eq!(LinkFunction::Sigmoid.eval(0.0), 0.5);
    }

    #[test]
    fn sigmoid_symmetry_identity() {
        for x in [0.1, 1.0, 5.0, 40.0] {
            let lhs = LinkFunction::Sigmoid.eval(-x);
            let rhs = 1.0 - LinkFunction::Sigmoid.eval(x);
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_link_saturates_at_the_extreme_gap() {
        // T = 20 clips with rewards in [-1, 1] bound the gap by 40, and
        // 40 * (1/80) + 0.5 = 1.0 exactly: in range, no clamping.
        let link = LinkFunction::linear(1.0 / 80.0, 0.5).unwrap();
        let (p, clamped) = link.eval_flagged(40.0);
        assert_eq!(p, 1.0);
        assert!(!clamped);
        let (p, clamped) = link.eval_flagged(45.0);
        assert_eq!(p, 1.0);
        assert!(clamped);
    }

    #[test]
    fn links_are_strictly_increasing_in_range() {
        let links = [LinkFunction::Sigmoid, LinkFunction::linear(0.01, 0.5).unwrap()];
        for link in links {
            let mut prev = link.eval(-30.0);
            for i in -29..=30 {
                let p = link.eval(i as f64);
                assert!(p >= prev);
                assert!((0.0..=1.0).contains(&p));
                prev = p;
            }
        }
    }

    #[test]
    fn inverse_round_trips() {
        for link in [LinkFunction::Sigmoid, LinkFunction::linear(0.02, 0.5).unwrap()] {
            for p in [0.05, 0.3, 0.5, 0.77, 0.95] {
                let x = link.inverse(p).unwrap();
                assert!((link.eval(x) - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_increasing_linear_link() {
        assert!(LinkFunction::linear(0.0, 0.5).is_err());
        assert!(LinkFunction::linear(-0.1, 0.5).is_err());
    }
}
