//! Exact reward-label search over a discrete grid.
//!
//! Finds labels minimizing the total link-loss of the predicted preferences
//! subject to the shared-reward-function constraint: the label is indexed by
//! distinct state-action, not by occurrence. Small instances are enumerated
//! exhaustively; larger ones fall back to multi-start coordinate descent.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::label::linkloss::LinkLoss;
use crate::label::types::{LabelMethod, LabelingMeta, Provenance, RewardLabeledDataset, RewardTuple, Side};
use crate::pref::PreferenceDataset;
use crate::rng::rng_for;

#[derive(Debug, Clone)]
pub struct OptimalLabelConfig {
    /// Maximum number of distinct state-actions accepted by the solver.
    pub cap: usize,
    /// Exhaustive enumeration is used while `grid_size ^ distinct <= budget`.
    pub enumeration_budget: u128,
    /// Coordinate-descent restarts on the fallback path.
    pub restarts: usize,
    /// Coordinate-descent sweep limit per restart.
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for OptimalLabelConfig {
    fn default() -> Self {
        OptimalLabelConfig {
            cap: 12,
            enumeration_budget: 100_000_000,
            restarts: 16,
            max_sweeps: 100,
            seed: 0,
        }
    }
}

/// Solution of the grid search: one label per distinct state-action.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalLabels {
    state_actions: Vec<(usize, usize)>,
    values: Vec<f64>,
    pub loss: f64,
    /// True when the full grid was enumerated (exact lexicographic
    /// tie-breaking); false for the coordinate-descent fallback.
    pub exhaustive: bool,
}

impl OptimalLabels {
    pub fn assignment(&self) -> BTreeMap<(usize, usize), f64> {
        self.state_actions.iter().copied().zip(self.values.iter().copied()).collect()
    }

    pub fn value_for(&self, state: usize, action: usize) -> Option<f64> {
        self.state_actions
            .iter()
            .position(|&sa| sa == (state, action))
            .map(|i| self.values[i])
    }

    /// Materialize per-step labels in the same tuple order as
    /// [`binary_label`](crate::label::binary_label).
    pub fn to_labeled(&self, dataset: &PreferenceDataset) -> Result<RewardLabeledDataset> {
        let map = self.assignment();
        let mut tuples = Vec::new();
        let mut provenance = Vec::new();
        for pair in dataset.pairs() {
            let first_chosen = pair.labels[0] == 1;
            for (clip, is_chosen) in [(&pair.clip_1, first_chosen), (&pair.clip_2, !first_chosen)] {
                let side = if is_chosen { Side::Chosen } else { Side::Rejected };
                for (t, step) in clip.steps.iter().enumerate() {
                    let reward = *map.get(&(step.state, step.action)).ok_or_else(|| {
                        Error::Internal(format!(
                            "no label for state-action ({}, {})",
                            step.state, step.action
                        ))
                    })?;
                    tuples.push(RewardTuple {
                        state: step.state,
                        action: step.action,
                        reward,
                        next_state: step.next_state,
                    });
                    provenance.push(Provenance { pair_id: pair.pair_id, side, t });
                }
            }
        }
        RewardLabeledDataset::new(
            tuples,
            provenance,
            LabelingMeta::for_method(LabelMethod::OptimalSearch),
        )
    }
}

/// Dataset compiled into per-pair sparse gap coefficients: the predicted
/// return gap of pair `i` is `sum_k coef_i[k] * x[k]` over distinct
/// state-action labels `x`.
pub(crate) struct Compiled {
    pub(crate) state_actions: Vec<(usize, usize)>,
    pub(crate) pair_coefs: Vec<Vec<(usize, f64)>>,
    /// For each label index, the pairs it participates in.
    touching: Vec<Vec<usize>>,
}

pub(crate) fn compile(dataset: &PreferenceDataset) -> Result<Compiled> {
    if !dataset.is_single_label() {
        return Err(Error::validation(
            "optimal label search requires a single-label dataset",
        ));
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut state_actions = Vec::new();
    let mut pair_coefs = Vec::with_capacity(dataset.len());
    for pair in dataset.pairs() {
        let (chosen, rejected) = pair.chosen_rejected()?;
        let mut coefs: BTreeMap<usize, f64> = BTreeMap::new();
        for (clip, sign) in [(chosen, 1.0), (rejected, -1.0)] {
            for (s, a) in clip.state_actions() {
                let k = *index.entry((s, a)).or_insert_with(|| {
                    state_actions.push((s, a));
                    state_actions.len() - 1
                });
                *coefs.entry(k).or_insert(0.0) += sign;
            }
        }
        pair_coefs.push(coefs.into_iter().collect::<Vec<_>>());
    }
    let mut touching = vec![Vec::new(); state_actions.len()];
    for (i, coefs) in pair_coefs.iter().enumerate() {
        for &(k, _) in coefs {
            touching[k].push(i);
        }
    }
    Ok(Compiled { state_actions, pair_coefs, touching })
}

impl Compiled {
    pub(crate) fn gaps(&self, x: &[f64]) -> Vec<f64> {
        self.pair_coefs
            .iter()
            .map(|coefs| coefs.iter().map(|&(k, c)| c * x[k]).sum())
            .collect()
    }

    fn loss(&self, link_loss: &LinkLoss, x: &[f64]) -> f64 {
        self.gaps(x).iter().map(|&g| link_loss.value(g)).sum()
    }
}

/// Total prediction loss of a label assignment on a single-label dataset:
/// `sum_i F(sum_t r(chosen step) - sum_t r(rejected step))` with labels
/// shared across occurrences of the same state-action.
pub fn label_loss(
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
    assignment: &BTreeMap<(usize, usize), f64>,
) -> Result<f64> {
    let compiled = compile(dataset)?;
    let x = compiled
        .state_actions
        .iter()
        .map(|sa| {
            assignment
                .get(sa)
                .copied()
                .ok_or_else(|| Error::param(format!("assignment missing state-action {sa:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compiled.loss(link_loss, &x))
}

fn build_grid(grid_step: f64) -> Result<Vec<f64>> {
    if !(grid_step > 0.0) {
        return Err(Error::param("grid_step must be positive"));
    }
    let m = 2.0 / grid_step;
    let points = m.round();
    if (m - points).abs() > 1e-9 || points < 1.0 {
        return Err(Error::param(format!(
            "grid_step {grid_step} does not divide the label range [-1, 1] evenly"
        )));
    }
    let points = points as usize;
    let mut grid: Vec<f64> = (0..=points).map(|i| -1.0 + i as f64 * grid_step).collect();
    *grid.last_mut().unwrap() = 1.0;
    Ok(grid)
}

/// Minimize the total link-loss over the label grid
/// `{-1, -1 + grid_step, ..., 1}`.
///
/// Exhaustive enumeration (lexicographic tie-breaking, smallest assignment
/// wins) while the grid is within the enumeration budget; multi-start
/// coordinate descent otherwise. Errors when the dataset has more distinct
/// state-actions than `config.cap`: fit a parametric reward model instead
/// of searching for exact labels at that size.
pub fn solve_optimal_labels(
    dataset: &PreferenceDataset,
    link_loss: &LinkLoss,
    grid_step: f64,
    config: &OptimalLabelConfig,
) -> Result<OptimalLabels> {
    let grid = build_grid(grid_step)?;
    let compiled = compile(dataset)?;
    let k = compiled.state_actions.len();
    if k == 0 {
        return Err(Error::validation("dataset contains no state-actions"));
    }
    if k > config.cap {
        return Err(Error::SolverCap(format!(
            "{k} distinct state-actions exceed the cap of {}; approximate with a \
             parametric reward model instead",
            config.cap
        )));
    }
    let total_points = (grid.len() as u128).checked_pow(k as u32);
    let exhaustive = matches!(total_points, Some(n) if n <= config.enumeration_budget);
    let (values, loss) = if exhaustive {
        enumerate(&compiled, link_loss, &grid)
    } else {
        coordinate_descent(&compiled, link_loss, &grid, config)
    };
    Ok(OptimalLabels {
        state_actions: compiled.state_actions,
        values,
        loss,
        exhaustive,
    })
}

/// Full odometer walk in lexicographic order; strict improvement keeps the
/// lexicographically smallest minimizer.
fn enumerate(compiled: &Compiled, link_loss: &LinkLoss, grid: &[f64]) -> (Vec<f64>, f64) {
    let k = compiled.state_actions.len();
    let mut idx = vec![0usize; k];
    let mut best_idx = idx.clone();
    let mut best_loss = f64::INFINITY;
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        let loss = compiled.loss(link_loss, &x);
        if loss < best_loss {
            best_loss = loss;
            best_idx = idx.clone();
        }
        // Advance the odometer; the last coordinate moves fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                let values = best_idx.iter().map(|&i| grid[i]).collect();
                return (values, best_loss);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn coordinate_descent(
    compiled: &Compiled,
    link_loss: &LinkLoss,
    grid: &[f64],
    config: &OptimalLabelConfig,
) -> (Vec<f64>, f64) {
    let k = compiled.state_actions.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for restart in 0..config.restarts.max(1) {
        // Restart 0 starts from the lexicographic floor; the rest random.
        let mut x: Vec<f64> = if restart == 0 {
            vec![grid[0]; k]
        } else {
            let mut rng = rng_for(config.seed, restart as u64);
            (0..k).map(|_| grid[rng.random_range(0..grid.len())]).collect()
        };
        let mut gaps = compiled.gaps(&x);
        let coef_at = |pi: usize, coord: usize| {
            compiled.pair_coefs[pi]
                .iter()
                .find(|&&(kk, _)| kk == coord)
                .map(|&(_, c)| c)
                .unwrap_or(0.0)
        };
        for _sweep in 0..config.max_sweeps {
            let mut changed = false;
            for coord in 0..k {
                // Loss change for moving this coordinate to v; ascending
                // iteration with strict improvement keeps the smallest
                // label among ties.
                let delta_for = |v: f64, x_cur: f64, gaps: &[f64]| {
                    compiled.touching[coord]
                        .iter()
                        .map(|&pi| {
                            let c = coef_at(pi, coord);
                            link_loss.value(gaps[pi] + c * (v - x_cur)) - link_loss.value(gaps[pi])
                        })
                        .sum::<f64>()
                };
                let mut best_v = grid[0];
                let mut best_delta = delta_for(grid[0], x[coord], &gaps);
                for &v in &grid[1..] {
                    let delta = delta_for(v, x[coord], &gaps);
                    if delta < best_delta - 1e-12 {
                        best_delta = delta;
                        best_v = v;
                    }
                }
                // Move on strict improvement, or sideways toward a smaller
                // label on an exact tie (lexicographic preference).
                let improves = best_delta < -1e-12;
                let tie_toward_floor = best_delta <= 1e-12 && best_v < x[coord];
                if best_v != x[coord] && (improves || tie_toward_floor) {
                    for &pi in &compiled.touching[coord] {
                        gaps[pi] += coef_at(pi, coord) * (best_v - x[coord]);
                    }
                    x[coord] = best_v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let loss = compiled.loss(link_loss, &x);
        best = match best {
            None => Some((x, loss)),
            Some((bx, bl)) => {
                if loss < bl - 1e-12 || ((loss - bl).abs() <= 1e-12 && lex_less(&x, &bx)) {
                    Some((x, loss))
                } else {
                    Some((bx, bl))
                }
            }
        };
    }
    best.expect("at least one restart runs")
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Step, TrajectoryClip};
    use crate::label::binary_label;
    use crate::pref::{synthetic, LinkFunction, PreferencePair};

    fn one_step_clip(id: u64, s: usize, a: usize) -> TrajectoryClip {
        TrajectoryClip::new(id, vec![Step { state: s, action: a, next_state: 0 }]).unwrap()
    }

    #[test]
    fn no_overlap_minimizer_is_binary() {
        for seed in 0..5 {
            let ds = synthetic::no_overlap_dataset(14, 3, 3, 2, seed).unwrap();
            let sol =
                solve_optimal_labels(&ds, &LinkLoss::SigmoidNll, 0.5, &OptimalLabelConfig::default())
                    .unwrap();
            let binary = binary_label(&ds).unwrap();
            let map = sol.assignment();
            for (tuple, _) in binary.iter() {
                assert_eq!(map[&(tuple.state, tuple.action)], tuple.reward);
            }
        }
    }

    #[test]
    fn forced_symmetry_returns_the_lexicographic_floor() {
        // One pair whose chosen and rejected clips visit the same
        // state-action: every grid value ties, so the search returns -1.
        let ds = PreferenceDataset::new(
            vec![PreferencePair {
                pair_id: 0,
                clip_1: one_step_clip(0, 3, 1),
                clip_2: one_step_clip(1, 3, 1),
                labels: vec![1],
            }],
            1,
            LinkFunction::Sigmoid,
        )
        .unwrap();
        let sol =
            solve_optimal_labels(&ds, &LinkLoss::SigmoidNll, 0.25, &OptimalLabelConfig::default())
                .unwrap();
        assert_eq!(sol.value_for(3, 1), Some(-1.0));
        assert!(sol.exhaustive);
    }

    #[test]
    fn shared_state_action_across_pairs_matches_exhaustive_oracle() {
        // Pair 0: u beats v. Pair 1: v beats w. Objective
        // F(x_u - x_v) + F(x_v - x_w) over the 0.25 grid.
        let ds = PreferenceDataset::new(
            vec![
                PreferencePair {
                    pair_id: 0,
                    clip_1: one_step_clip(0, 0, 0),
                    clip_2: one_step_clip(1, 1, 0),
                    labels: vec![1],
                },
                PreferencePair {
                    pair_id: 1,
                    clip_1: one_step_clip(1, 1, 0),
                    clip_2: one_step_clip(2, 2, 0),
                    labels: vec![1],
                },
            ],
            1,
            LinkFunction::Sigmoid,
        )
        .unwrap();
        let f = LinkLoss::SigmoidNll;
        let sol = solve_optimal_labels(&ds, &f, 0.25, &OptimalLabelConfig::default()).unwrap();

        // Independent oracle: literal triple loop over the grid.
        let grid: Vec<f64> = (0..=8).map(|i| -1.0 + 0.25 * i as f64).collect();
        let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
        for &u in &grid {
            for &v in &grid {
                for &w in &grid {
                    let loss = f.value(u - v) + f.value(v - w);
                    if loss < best.0 {
                        best = (loss, u, v, w);
                    }
                }
            }
        }
        assert!((sol.loss - best.0).abs() < 1e-12);
        assert_eq!(sol.value_for(0, 0), Some(best.1));
        assert_eq!(sol.value_for(1, 0), Some(best.2));
        assert_eq!(sol.value_for(2, 0), Some(best.3));
        // The symmetric middle label settles at zero.
        assert_eq!(sol.value_for(1, 0), Some(0.0));
        assert_eq!(sol.value_for(0, 0), Some(1.0));
        assert_eq!(sol.value_for(2, 0), Some(-1.0));
    }

    #[test]
    fn coordinate_descent_handles_sizes_past_the_enumeration_budget() {
        let ds = synthetic::no_overlap_dataset(30, 4, 3, 3, 11).unwrap();
        let config = OptimalLabelConfig {
            cap: 24,
            enumeration_budget: 1_000,
            ..OptimalLabelConfig::default()
        };
        let sol = solve_optimal_labels(&ds, &LinkLoss::SigmoidNll, 0.5, &config).unwrap();
        assert!(!sol.exhaustive);
        let binary = binary_label(&ds).unwrap();
        let map = sol.assignment();
        for (tuple, _) in binary.iter() {
            assert_eq!(map[&(tuple.state, tuple.action)], tuple.reward);
        }
    }

    #[test]
    fn cap_overflow_is_a_size_error() {
        let ds = synthetic::no_overlap_dataset(30, 4, 3, 3, 0).unwrap();
        let err = solve_optimal_labels(
            &ds,
            &LinkLoss::SigmoidNll,
            0.5,
            &OptimalLabelConfig { cap: 12, ..OptimalLabelConfig::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SolverCap(_)));
        assert!(err.to_string().contains("reward model"));
    }

    #[test]
    fn objective_decreases_when_a_chosen_label_increases() {
        // Directional probe of monotonicity: raising any chosen-side label
        // never increases the objective.
        for f in LinkLoss::registry() {
            let ds = synthetic::no_overlap_dataset(20, 3, 2, 2, 3).unwrap();
            let mut assignment: BTreeMap<(usize, usize), f64> = ds
                .distinct_state_actions()
                .into_iter()
                .map(|sa| (sa, 0.25))
                .collect();
            let base = label_loss(&ds, &f, &assignment).unwrap();
            let (chosen, _) = ds.pairs()[0].chosen_rejected().unwrap();
            let sa = chosen.state_actions().next().unwrap();
            assignment.insert(sa, 0.75);
            let raised = label_loss(&ds, &f, &assignment).unwrap();
            assert!(raised <= base + 1e-12, "{}: {raised} > {base}", f.name());
        }
    }
}
