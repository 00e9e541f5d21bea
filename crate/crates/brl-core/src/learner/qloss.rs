//! Bellman-style objectives over tabular Q functions.
//!
//! `bellman_label_loss` scores a Q table against scalar reward labels tuple
//! by tuple; `preference_bellman_loss` scores it against preference signals
//! through the derived rewards `Q(s, a) - gamma * max_a' Q(s', a')`.
//! Gradients treat the argmax as locally constant.

use crate::error::{Error, Result};
use crate::label::{LinkLoss, RewardLabeledDataset};
use crate::learner::qtable::QTable;
use crate::pref::{PreferenceDataset, PreferencePair};

/// `sum_tuples |Q(s,a) - (r + gamma * max_a' Q(s',a'))|`.
pub fn bellman_label_loss(q: &QTable, labeled: &RewardLabeledDataset) -> f64 {
    labeled
        .tuples()
        .iter()
        .map(|t| {
            (q.get(t.state, t.action)
                - (t.reward + q.discount() * q.max_value(t.next_state)))
            .abs()
        })
        .sum()
}

/// Subgradient of [`bellman_label_loss`] over the flattened Q parameters,
/// with the argmax fixed and `sign(0) = 0`.
pub fn bellman_label_grad(q: &QTable, labeled: &RewardLabeledDataset) -> Vec<f64> {
    let actions = q.action_count();
    let mut grad = vec![0.0; q.state_count() * actions];
    for t in labeled.tuples() {
        let a_star = q.max_action(t.next_state);
        let diff =
            q.get(t.state, t.action) - (t.reward + q.discount() * q.get(t.next_state, a_star));
        let sign = if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        };
        if sign != 0.0 {
            grad[t.state * actions + t.action] += sign;
            grad[t.next_state * actions + a_star] -= sign * q.discount();
        }
    }
    grad
}

/// Derived-reward sum of a clip: `sum (Q(s,a) - gamma * max_a' Q(s',a'))`.
fn clip_derived_sum(q: &QTable, clip: &crate::env::TrajectoryClip) -> f64 {
    clip.steps
        .iter()
        .map(|st| q.derived_reward(st.state, st.action, st.next_state))
        .sum()
}

/// Derived-reward gap of a pair, oriented `clip_1` minus `clip_2`.
pub fn pair_derived_gap(q: &QTable, pair: &PreferencePair) -> f64 {
    clip_derived_sum(q, &pair.clip_1) - clip_derived_sum(q, &pair.clip_2)
}

/// `sum_i F(derived-reward gap oriented toward the preferred clip)`, with
/// multi-label pairs contributing one term per label.
pub fn preference_bellman_loss(
    q: &QTable,
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::param("empty dataset"));
    }
    let mut total = 0.0;
    for pair in dataset.pairs() {
        let gap = pair_derived_gap(q, pair);
        let (n1, n2) = pair.label_counts();
        total += n1 as f64 * link_loss.value(gap) + n2 as f64 * link_loss.value(-gap);
    }
    Ok(total)
}

/// Analytic gradient of [`preference_bellman_loss`] over the flattened Q
/// parameters, argmax fixed.
pub fn preference_bellman_grad(
    q: &QTable,
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
) -> Result<Vec<f64>> {
    if dataset.is_empty() {
        return Err(Error::param("empty dataset"));
    }
    let actions = q.action_count();
    let mut grad = vec![0.0; q.state_count() * actions];
    for pair in dataset.pairs() {
        let gap = pair_derived_gap(q, pair);
        let (n1, n2) = pair.label_counts();
        let coef = n1 as f64 * link_loss.derivative(gap) - n2 as f64 * link_loss.derivative(-gap);
        if coef == 0.0 {
            continue;
        }
        for (clip, sign) in [(&pair.clip_1, 1.0), (&pair.clip_2, -1.0)] {
            for st in &clip.steps {
                let a_star = q.max_action(st.next_state);
                grad[st.state * actions + st.action] += coef * sign;
                grad[st.next_state * actions + a_star] -= coef * sign * q.discount();
            }
        }
    }
    Ok(grad)
}

/// Project a Q table so that every listed transition's derived reward lies
/// in `[-1, 1]`: clip the derived rewards, then re-telescope.
///
/// The derived rewards on the dataset are clipped into the bound and Q is
/// rebuilt by Bellman backups so the clipped values telescope consistently
/// (duplicated state-actions use the mean of their clipped values; entries
/// outside the dataset keep their current values). A few box-clamp passes
/// then absorb the residue that duplicate state-actions with conflicting
/// successors can leave behind.
pub fn project_derived_bounds(q: &mut QTable, transitions: &[(usize, usize, usize)]) {
    use std::collections::BTreeMap;

    // Clip the derived rewards and average duplicates.
    let mut clipped: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    let mut succ: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(s, a, s2) in transitions {
        let d = q.derived_reward(s, a, s2).clamp(-1.0, 1.0);
        let e = clipped.entry((s, a)).or_insert((0.0, 0));
        e.0 += d;
        e.1 += 1;
        succ.entry((s, a)).or_default().push(s2);
    }

    // Re-telescope: backups with the clipped values as rewards.
    for _ in 0..4000 {
        let mut delta: f64 = 0.0;
        for (&(s, a), &(d_sum, n)) in &clipped {
            let succs = &succ[&(s, a)];
            let future: f64 =
                succs.iter().map(|&s2| q.max_value(s2)).sum::<f64>() / succs.len() as f64;
            let value = d_sum / n as f64 + q.discount() * future;
            delta = delta.max((value - q.get(s, a)).abs());
            q.set(s, a, value);
        }
        if delta <= 1e-13 {
            break;
        }
    }

    // Box passes: clamp each entry into the intersection of its
    // transitions' feasible intervals under frozen maxima.
    for _pass in 0..200 {
        let maxima: Vec<f64> = (0..q.state_count()).map(|s| q.max_value(s)).collect();
        let mut bounds: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for &(s, a, s2) in transitions {
            let lo = -1.0 + q.discount() * maxima[s2];
            let hi = 1.0 + q.discount() * maxima[s2];
            bounds
                .entry((s, a))
                .and_modify(|e| {
                    e.0 = e.0.max(lo);
                    e.1 = e.1.min(hi);
                })
                .or_insert((lo, hi));
        }
        let mut moved: f64 = 0.0;
        for ((s, a), (lo, hi)) in bounds {
            let value = q.get(s, a);
            let clamped = if lo > hi { 0.5 * (lo + hi) } else { value.clamp(lo, hi) };
            moved = moved.max((clamped - value).abs());
            q.set(s, a, clamped);
        }
        if moved <= 1e-12 {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::binary_label;
    use crate::pref::synthetic;
    use crate::rng::rng_for;
    use rand::Rng;

    fn random_q(states: usize, actions: usize, discount: f64, seed: u64) -> QTable {
        let mut rng = rng_for(seed, 0x71);
        let mut q = QTable::new(states, actions, discount, 0.0).unwrap();
        for s in 0..states {
            for a in 0..actions {
                q.set(s, a, rng.random_range(-2.0..2.0));
            }
        }
        q
    }

    #[test]
    fn projection_enforces_the_derived_bound() {
        let ds = synthetic::random_dataset(6, 3, 5, 4, 2).unwrap();
        let transitions: Vec<(usize, usize, usize)> = ds
            .pairs()
            .iter()
            .flat_map(|p| p.clip_1.steps.iter().chain(&p.clip_2.steps))
            .map(|st| (st.state, st.action, st.next_state))
            .collect();
        let mut q = random_q(6, 3, 0.9, 3);
        assert!(q.derived_bound_violation(&transitions) > 0.0);
        project_derived_bounds(&mut q, &transitions);
        assert!(q.derived_bound_violation(&transitions) < 1e-9);
    }

    #[test]
    fn binary_label_bellman_loss_telescopes_to_the_linear_form() {
        // With the derived-reward bound satisfied, the absolute values open
        // and L3 equals 2TN + signed telescoped sums.
        for seed in 0..10 {
            let ds = synthetic::random_dataset(8, 3, 4, 3, seed).unwrap();
            let labeled = binary_label(&ds).unwrap();
            let transitions: Vec<(usize, usize, usize)> = labeled
                .tuples()
                .iter()
                .map(|t| (t.state, t.action, t.next_state))
                .collect();
            let mut q = random_q(8, 3, 0.95, seed + 50);
            project_derived_bounds(&mut q, &transitions);
            assert!(q.derived_bound_violation(&transitions) < 1e-9);

            let loss = bellman_label_loss(&q, &labeled);
            let mut linear = labeled.len() as f64;
            for (t, prov) in labeled.iter() {
                let d = q.derived_reward(t.state, t.action, t.next_state);
                match prov.side {
                    crate::label::Side::Chosen => linear -= d,
                    crate::label::Side::Rejected => linear += d,
                }
            }
            assert!((loss - linear).abs() < 1e-9, "seed {seed}: {loss} vs {linear}");
        }
    }

    #[test]
    fn zero_q_preference_loss_is_log_two_per_pair() {
        let ds = synthetic::random_dataset(5, 2, 6, 3, 9).unwrap();
        let q = QTable::new(5, 2, 0.99, 0.0).unwrap();
        let loss = preference_bellman_loss(&q, &ds, &LinkLoss::SigmoidNll).unwrap();
        assert!((loss - 6.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }
}
