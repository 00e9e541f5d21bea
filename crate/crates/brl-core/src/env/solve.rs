//! Value iteration and greedy policy extraction.

use crate::env::{Mdp, Policy};
use crate::error::{Error, Result};

/// Q-values from one-step lookahead on a state-value vector.
fn q_from_values(mdp: &Mdp, values: &[f64], state: usize, action: usize) -> f64 {
    let row = mdp.transition_row(state, action);
    let expected: f64 = row.iter().zip(values).map(|(p, v)| p * v).sum();
    mdp.reward(state, action) + mdp.discount() * expected
}

/// Optimal state values by value iteration, run until the sup-norm change
/// between sweeps is at most `tolerance`.
pub fn optimal_values(mdp: &Mdp, tolerance: f64) -> Result<Vec<f64>> {
    if tolerance <= 0.0 {
        return Err(Error::param("tolerance must be positive"));
    }
    let n = mdp.state_count();
    let mut values = vec![0.0; n];
    loop {
        let mut next = vec![0.0; n];
        let mut delta: f64 = 0.0;
        for s in 0..n {
            let best = (0..mdp.action_count())
                .map(|a| q_from_values(mdp, &values, s, a))
                .fold(f64::NEG_INFINITY, f64::max);
            next[s] = best;
            delta = delta.max((best - values[s]).abs());
        }
        values = next;
        if delta <= tolerance {
            return Ok(values);
        }
    }
}

/// Greedy deterministic policy for the optimal values; ties break toward
/// the lowest action index.
pub fn solve_optimal(mdp: &Mdp, tolerance: f64) -> Result<Policy> {
    let values = optimal_values(mdp, tolerance)?;
    let actions: Vec<usize> = (0..mdp.state_count())
        .map(|s| {
            let mut best_a = 0;
            let mut best_q = q_from_values(mdp, &values, s, 0);
            for a in 1..mdp.action_count() {
                let q = q_from_values(mdp, &values, s, a);
                if q > best_q {
                    best_q = q;
                    best_a = a;
                }
            }
            best_a
        })
        .collect();
    Policy::deterministic(&actions, mdp.action_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::eval::exact_return;
    use crate::env::make_gridworld;

    #[test]
    fn chain_picks_the_rewarding_action() {
        // Two states, two actions: action 1 moves toward the absorbing goal.
        let mdp = Mdp::new(
            2,
            2,
            vec![
                vec![1.0, 0.0], // s0, stay
                vec![0.0, 1.0], // s0, advance
                vec![0.0, 1.0], // s1 absorbing
                vec![0.0, 1.0],
            ],
            vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            vec![1.0, 0.0],
            0.99,
        )
        .unwrap();
        let policy = solve_optimal(&mdp, 1e-10).unwrap();
        assert_eq!(policy.greedy_action(0), 1);
    }

    #[test]
    fn two_cell_chain_matches_closed_form_return() {
        // One move to the goal: J = step + gamma * goal / (1 - gamma).
        let mdp = make_gridworld(2, 1, 1.0, 0.0, 0.0, 0).unwrap();
        let policy = solve_optimal(&mdp, 1e-10).unwrap();
        let j = exact_return(&mdp, &policy).unwrap();
        let gamma: f64 = 0.99;
        let expected = gamma * 1.0 / (1.0 - gamma);
        assert!((j - expected).abs() < 1e-6, "J {j} vs closed form {expected}");
    }

    #[test]
    fn deterministic_grid_start_value_is_a_geometric_sum() {
        let mdp = make_gridworld(5, 5, 1.0, -0.01, 0.0, 0).unwrap();
        let policy = solve_optimal(&mdp, 1e-10).unwrap();
        let j = exact_return(&mdp, &policy).unwrap();
        // Shortest path: 8 moves at the step penalty, then the absorbing
        // goal reward forever.
        let gamma: f64 = 0.99;
        let d = 8;
        let step_part: f64 = (0..d).map(|t| gamma.powi(t) * -0.01).sum();
        let goal_part = gamma.powi(d) * 1.0 / (1.0 - gamma);
        assert!((j - (step_part + goal_part)).abs() < 1e-6);

        // Every greedy move reduces Manhattan distance to the goal.
        for s in 0..24 {
            let (x, y) = (s % 5, s / 5);
            let a = policy.greedy_action(s);
            let (nx, ny) = match a {
                0 => (x, y.saturating_sub(1)),
                1 => ((x + 1).min(4), y),
                2 => (x, (y + 1).min(4)),
                _ => (x.saturating_sub(1), y),
            };
            let before = (4 - x) + (4 - y);
            let after = (4 - nx) + (4 - ny);
            assert!(after < before, "state {s}: action {a} does not approach the goal");
        }
    }

    #[test]
    fn tolerance_does_not_change_the_greedy_policy() {
        // Symmetric grids have exactly tied actions, so use a random MDP
        // whose action gaps dwarf the value-iteration error.
        let mdp = crate::env::make_random_mdp(8, 3, 0.95, 17).unwrap();
        let coarse = solve_optimal(&mdp, 1e-6).unwrap();
        let fine = solve_optimal(&mdp, 1e-10).unwrap();
        assert_eq!(coarse, fine);
    }
}
