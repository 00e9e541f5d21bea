use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One environment step: `(state, action, next_state)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    #[serde(rename = "s")]
    pub state: usize,
    #[serde(rename = "a")]
    pub action: usize,
    #[serde(rename = "s2")]
    pub next_state: usize,
}

/// A fixed-length window of consecutive steps, the unit of comparison in
/// preference datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryClip {
    pub clip_id: u64,
    pub steps: Vec<Step>,
}

impl TrajectoryClip {
    /// Build a clip, checking the chaining invariant: the next state of step
    /// `t` must be the state of step `t + 1`.
    pub fn new(clip_id: u64, steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::param("clip must contain at least one step"));
        }
        validate_chain(&steps)?;
        Ok(TrajectoryClip { clip_id, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// State-action pairs visited by this clip, in order.
    pub fn state_actions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.iter().map(|s| (s.state, s.action))
    }
}

/// Check that consecutive steps chain.
pub fn validate_chain(steps: &[Step]) -> Result<()> {
    for (t, pair) in steps.windows(2).enumerate() {
        if pair[0].next_state != pair[1].state {
            return Err(Error::validation(format!(
                "steps {t} and {} do not chain: next_state {} vs state {}",
                t + 1,
                pair[0].next_state,
                pair[1].state
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_broken_chain() {
        let steps = vec![
            Step { state: 0, action: 0, next_state: 1 },
            Step { state: 2, action: 0, next_state: 3 },
        ];
        assert!(TrajectoryClip::new(0, steps).is_err());
    }

    #[test]
    fn accepts_chained_steps() {
        let steps = vec![
            Step { state: 0, action: 1, next_state: 2 },
            Step { state: 2, action: 0, next_state: 2 },
        ];
        assert!(TrajectoryClip::new(0, steps).is_ok());
    }
}
