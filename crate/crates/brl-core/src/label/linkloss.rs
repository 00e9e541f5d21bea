use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pref::{sigmoid, LinkFunction};

/// Loss applied to a predicted preference probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `L(p) = -ln p`.
    NegLogProb,
    /// `L(p) = 1 - p`.
    OneMinusProb,
}

/// A link-loss function `F(x) = L(f(x))`: the prediction loss of reward
/// labels against a preference label, as a function of the return gap.
/// Valid instances are monotonically decreasing; `Linear` with positive
/// slope and `IncreasingControl` exist as negative controls for the
/// verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkLoss {
    /// `F(x) = -ln(sigmoid(x))`; sigmoid link with negative-log loss.
    SigmoidNll,
    /// `F(x) = 1 - sigmoid(x)`.
    SigmoidComplement,
    /// `F(x) = intercept + slope * x`.
    Linear { slope: f64, intercept: f64 },
    /// `F(x) = -ln(sigmoid(-x))`; increasing on purpose.
    IncreasingControl,
}

impl LinkLoss {
    /// Compose a link function with a loss on probabilities.
    pub fn compose(link: LinkFunction, loss: LossKind) -> Result<Self> {
        match (link, loss) {
            (LinkFunction::Sigmoid, LossKind::NegLogProb) => Ok(LinkLoss::SigmoidNll),
            (LinkFunction::Sigmoid, LossKind::OneMinusProb) => Ok(LinkLoss::SigmoidComplement),
            (LinkFunction::Linear { slope, offset }, LossKind::OneMinusProb) => Ok(LinkLoss::Linear {
                slope: -slope,
                intercept: 1.0 - offset,
            }),
            (LinkFunction::Linear { .. }, LossKind::NegLogProb) => Err(Error::param(
                "negative-log loss over a clamped linear link is not smooth; unsupported",
            )),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            // -ln(sigmoid(x)) = ln(1 + e^-x), computed stably.
            LinkLoss::SigmoidNll => {
                if x >= 0.0 {
                    (-x).exp().ln_1p()
                } else {
                    -x + x.exp().ln_1p()
                }
            }
            LinkLoss::SigmoidComplement => 1.0 - sigmoid(x),
            LinkLoss::Linear { slope, intercept } => intercept + slope * x,
            LinkLoss::IncreasingControl => {
                if x <= 0.0 {
                    x.exp().ln_1p()
                } else {
                    x + (-x).exp().ln_1p()
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            LinkLoss::SigmoidNll => sigmoid(x) - 1.0,
            LinkLoss::SigmoidComplement => {
                let s = sigmoid(x);
                -s * (1.0 - s)
            }
            LinkLoss::Linear { slope, .. } => slope,
            LinkLoss::IncreasingControl => sigmoid(x),
        }
    }

    /// Analytic monotonicity direction.
    pub fn is_decreasing(&self) -> bool {
        match *self {
            LinkLoss::SigmoidNll | LinkLoss::SigmoidComplement => true,
            LinkLoss::Linear { slope, .. } => slope < 0.0,
            LinkLoss::IncreasingControl => false,
        }
    }

    /// Sampled monotonicity check over `[lo, hi]` with `n` points.
    pub fn monotone_decreasing_sampled(&self, lo: f64, hi: f64, n: usize) -> bool {
        let mut prev = self.value(lo);
        for i in 1..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.value(x);
            if v > prev + 1e-12 {
                return false;
            }
            prev = v;
        }
        true
    }

    /// The standard registry used by the verification checks: sigmoid with
    /// negative-log loss, a linear link with linear loss, and sigmoid with
    /// complement loss.
    pub fn registry() -> Vec<LinkLoss> {
        vec![
            LinkLoss::SigmoidNll,
            LinkLoss::compose(
                LinkFunction::Linear { slope: 1.0 / 80.0, offset: 0.5 },
                LossKind::OneMinusProb,
            )
            .expect("supported composition"),
            LinkLoss::SigmoidComplement,
        ]
    }

    pub fn name(&self) -> String {
        match *self {
            LinkLoss::SigmoidNll => "sigmoid-nll".into(),
            LinkLoss::SigmoidComplement => "sigmoid-complement".into(),
            LinkLoss::Linear { slope, intercept } => format!("linear({slope},{intercept})"),
            LinkLoss::IncreasingControl => "increasing-control".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_members_are_decreasing() {
        for f in LinkLoss::registry() {
            assert!(f.is_decreasing(), "{}", f.name());
            assert!(f.monotone_decreasing_sampled(-40.0, 40.0, 400), "{}", f.name());
        }
    }

    #[test]
    fn nll_matches_naive_formula() {
        for x in [-30.0, -2.0, 0.0, 1.5, 30.0] {
            let naive = -(sigmoid(x)).ln();
            assert!((LinkLoss::SigmoidNll.value(x) - naive).abs() < 1e-12);
        }
        assert!((LinkLoss::SigmoidNll.value(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for f in [
            LinkLoss::SigmoidNll,
            LinkLoss::SigmoidComplement,
            LinkLoss::Linear { slope: -0.25, intercept: 1.0 },
            LinkLoss::IncreasingControl,
        ] {
            for x in [-3.0, -0.5, 0.0, 0.7, 4.0] {
                let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                assert!(
                    (f.derivative(x) - fd).abs() < 1e-6,
                    "{} at {x}: {} vs {fd}",
                    f.name(),
                    f.derivative(x)
                );
            }
        }
    }

    #[test]
    fn increasing_control_flags_itself() {
        assert!(!LinkLoss::IncreasingControl.is_decreasing());
        assert!(!LinkLoss::IncreasingControl.monotone_decreasing_sampled(-5.0, 5.0, 50));
        assert!(!LinkLoss::Linear { slope: 0.5, intercept: 0.0 }.is_decreasing());
    }

    #[test]
    fn linear_composition_folds_the_offset() {
        let f = LinkLoss::compose(
            LinkFunction::Linear { slope: 0.0125, offset: 0.5 },
            LossKind::OneMinusProb,
        )
        .unwrap();
        // 1 - (0.0125 x + 0.5) = 0.5 - 0.0125 x.
        assert!((f.value(0.0) - 0.5).abs() < 1e-15);
        assert!((f.value(40.0) - 0.0).abs() < 1e-15);
    }
}
