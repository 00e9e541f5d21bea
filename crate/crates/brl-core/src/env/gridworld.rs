//! Grid and chain environments used as ground truth.

use crate::env::Mdp;
use crate::error::{Error, Result};
use crate::rng::rng_for;

use rand::Rng;

/// Grid actions, in index order: up, right, down, left.
const MOVES: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

/// Build a `width x height` gridworld.
///
/// The agent starts at the top-left cell and the bottom-right cell is an
/// absorbing goal. Every action from the goal self-loops and earns
/// `goal_reward`; every other state-action earns `step_penalty`. A move
/// slips to one of the two perpendicular directions (with probability
/// `slip_probability`, split evenly); moving off the grid leaves the agent
/// in place. The layout is fully determined by the shape parameters; `seed`
/// is accepted for interface uniformity with the other constructors.
pub fn make_gridworld(
    width: usize,
    height: usize,
    goal_reward: f64,
    step_penalty: f64,
    slip_probability: f64,
    _seed: u64,
) -> Result<Mdp> {
    if width * height < 2 {
        return Err(Error::param("grid needs at least two cells"));
    }
    if !(-1.0..=1.0).contains(&goal_reward) || !(-1.0..=1.0).contains(&step_penalty) {
        return Err(Error::param("rewards must lie in [-1, 1]"));
    }
    if !(0.0..=1.0).contains(&slip_probability) {
        return Err(Error::param("slip probability must lie in [0, 1]"));
    }

    let states = width * height;
    let actions = MOVES.len();
    let goal = states - 1;
    let cell = |x: usize, y: usize| y * width + x;

    let mut transition = vec![vec![0.0; states]; states * actions];
    let mut reward = vec![vec![step_penalty; actions]; states];
    reward[goal] = vec![goal_reward; actions];

    for y in 0..height {
        for x in 0..width {
            let s = cell(x, y);
            for a in 0..actions {
                let row = &mut transition[s * actions + a];
                if s == goal {
                    row[s] = 1.0;
                    continue;
                }
                // Perpendicular directions share the slip mass evenly.
                let outcomes = [
                    (a, 1.0 - slip_probability),
                    ((a + 1) % 4, slip_probability / 2.0),
                    ((a + 3) % 4, slip_probability / 2.0),
                ];
                for (dir, prob) in outcomes {
                    if prob == 0.0 {
                        continue;
                    }
                    let (dx, dy) = MOVES[dir];
                    let nx = x as isize + dx;
                    let ny = y as isize + dy;
                    let target = if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize
                    {
                        s
                    } else {
                        cell(nx as usize, ny as usize)
                    };
                    row[target] += prob;
                }
            }
        }
    }

    let mut init = vec![0.0; states];
    init[0] = 1.0;

    let mut mdp = Mdp::new(states, actions, transition, reward, init, 0.99)?;
    let coords = (0..states)
        .map(|s| {
            let x = (s % width) as f64 / (width.max(2) - 1) as f64;
            let y = (s / width) as f64 / (height.max(2) - 1).max(1) as f64;
            [x, y]
        })
        .collect();
    mdp.set_coords(coords);
    Ok(mdp)
}

/// Random dense MDP, used by the numerical checks.
///
/// Transition rows are drawn from a Dirichlet-like normalization of uniform
/// weights, rewards uniformly from `[-1, 1]`, and the initial distribution
/// is uniform.
pub fn make_random_mdp(
    state_count: usize,
    action_count: usize,
    discount: f64,
    seed: u64,
) -> Result<Mdp> {
    if state_count == 0 || action_count == 0 {
        return Err(Error::param("state and action counts must be positive"));
    }
    let mut rng = rng_for(seed, 0xB0D);
    let mut transition = Vec::with_capacity(state_count * action_count);
    for _ in 0..state_count * action_count {
        let mut row: Vec<f64> = (0..state_count).map(|_| rng.random::<f64>() + 1e-3).collect();
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= sum);
        // Absorb normalization error into the largest entry.
        let total: f64 = row.iter().sum();
        let imax = (0..state_count).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap();
        row[imax] += 1.0 - total;
        transition.push(row);
    }
    let reward = (0..state_count)
        .map(|_| (0..action_count).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let init = vec![1.0 / state_count as f64; state_count];
    Mdp::new(state_count, action_count, transition, reward, init, discount)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_grid_rows_are_one_hot() {
        let mdp = make_gridworld(5, 5, 1.0, -0.01, 0.0, 7).unwrap();
        assert_eq!(mdp.state_count(), 25);
        for s in 0..25 {
            for a in 0..4 {
                let row = mdp.transition_row(s, a);
                assert_eq!(row.iter().filter(|&&p| p == 1.0).count(), 1);
                assert_eq!(row.iter().filter(|&&p| p == 0.0).count(), 24);
            }
        }
    }

    #[test]
    fn slippery_grid_rows_sum_to_one() {
        let mdp = make_gridworld(5, 5, 1.0, -0.01, 0.3, 0).unwrap();
        for s in 0..mdp.state_count() {
            for a in 0..mdp.action_count() {
                let sum: f64 = mdp.transition_row(s, a).iter().sum();
                assert!((sum - 1.0).abs() <= 1e-9, "row ({s},{a}) sums to {sum}");
            }
        }
    }

    #[test]
    fn goal_is_absorbing() {
        let mdp = make_gridworld(3, 3, 1.0, 0.0, 0.5, 0).unwrap();
        let goal = 8;
        for a in 0..4 {
            assert_eq!(mdp.transition_row(goal, a)[goal], 1.0);
            assert_eq!(mdp.reward(goal, a), 1.0);
        }
    }

    #[test]
    fn rejects_out_of_bounds_rewards() {
        assert!(make_gridworld(2, 2, 1.5, 0.0, 0.0, 0).is_err());
        assert!(make_gridworld(2, 2, 1.0, -2.0, 0.0, 0).is_err());
    }

    #[test]
    fn random_mdp_is_valid_and_deterministic() {
        let a = make_random_mdp(6, 3, 0.95, 42).unwrap();
        let b = make_random_mdp(6, 3, 0.95, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, make_random_mdp(6, 3, 0.95, 43).unwrap());
    }
}
