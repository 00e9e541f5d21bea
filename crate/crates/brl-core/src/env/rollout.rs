use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Mdp, Policy, Step};
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Sample an index from a probability row.
fn sample_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Roll out one episode of exactly `horizon` steps.
///
/// The start state is drawn from the MDP's initial distribution, actions
/// from the policy, and successors from the transition table. The result is
/// reproducible for identical `(mdp, policy, horizon, seed)`.
pub fn rollout(mdp: &Mdp, policy: &Policy, horizon: usize, seed: u64) -> Result<Vec<Step>> {
    if horizon == 0 {
        return Err(Error::param("horizon must be at least 1"));
    }
    check_shapes(mdp, policy)?;
    let mut rng = rng_from(seed);
    Ok(rollout_with(mdp, policy, horizon, &mut rng))
}

/// Roll out using an already-positioned RNG; used by dataset generators that
/// manage their own seed streams.
pub(crate) fn rollout_with(
    mdp: &Mdp,
    policy: &Policy,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Step> {
    let mut state = sample_categorical(rng, mdp.initial_distribution());
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let action = sample_categorical(rng, policy.action_probs(state));
        let next_state = sample_categorical(rng, mdp.transition_row(state, action));
        steps.push(Step { state, action, next_state });
        state = next_state;
    }
    steps
}

pub(crate) fn check_shapes(mdp: &Mdp, policy: &Policy) -> Result<()> {
    if policy.state_count() != mdp.state_count() || policy.action_count() != mdp.action_count() {
        return Err(Error::param(format!(
            "policy shape ({}, {}) does not match mdp ({}, {})",
            policy.state_count(),
            policy.action_count(),
            mdp.state_count(),
            mdp.action_count()
        )));
    }
    Ok(())
}
