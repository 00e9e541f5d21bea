//! Randomized numerical checks of the labeling and learning equivalences.
//!
//! Every check draws independent micro-instances from a seed, measures a
//! violation, and reports the worst case. Negative controls verify that the
//! checks are not vacuous: they must fail in the predicted way when their
//! premises are broken.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Step, TrajectoryClip};
use crate::error::Result;
use crate::label::{binary_label, solve_optimal_labels, LinkLoss, OptimalLabelConfig};
use crate::learner::QTable;
use crate::model::FeatureMap;
use crate::pref::{synthetic, PreferenceDataset, PreferencePair};
use crate::rng::{derive_seed, rng_for};
use crate::verify::finite_diff::{cosine, finite_difference_gradient, relative_error};
use crate::verify::quadruple::LossQuadruple;
use crate::verify::report::CheckReport;

const DISCOUNT: f64 = 0.99;

fn micro_no_overlap(rng: &mut ChaCha8Rng, seed: u64, idx: u64) -> Result<PreferenceDataset> {
    let n = rng.random_range(1..=3usize);
    let t = rng.random_range(1..=3usize);
    let actions = rng.random_range(2..=4usize);
    let states = 2 * n * t + 2;
    synthetic::no_overlap_dataset(states, actions, n, t, derive_seed(seed, 0x0D5 + idx))
}

/// Space dimensions of a synthetic dataset (upper bounds on indices).
fn dataset_space(ds: &PreferenceDataset) -> (usize, usize) {
    let mut states = 0;
    let mut actions = 0;
    for pair in ds.pairs() {
        for clip in [&pair.clip_1, &pair.clip_2] {
            for st in &clip.steps {
                states = states.max(st.state + 1).max(st.next_state + 1);
                actions = actions.max(st.action + 1);
            }
        }
    }
    (states, actions)
}

/// Optimal grid labels equal binary labels on overlap-free data, for every
/// registered link-loss. Exact check: tolerance 0.
pub fn check_binary_labels_optimal(n_instances: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("binary-labels-optimal", 0.0);
    let registry = LinkLoss::registry();
    let config = OptimalLabelConfig { cap: 32, ..OptimalLabelConfig::default() };
    for i in 0..n_instances {
        let mut rng = rng_for(seed, i as u64);
        let ds = micro_no_overlap(&mut rng, seed, i as u64)?;
        let binary = binary_label(&ds)?;
        let mut worst: f64 = 0.0;
        for f in &registry {
            let sol = solve_optimal_labels(&ds, f, 0.5, &config)?;
            let map = sol.assignment();
            for (tuple, _) in binary.iter() {
                worst = worst.max((map[&(tuple.state, tuple.action)] - tuple.reward).abs());
            }
        }
        report.record(worst);
    }
    Ok(report.finish())
}

/// Infinity-norm-normalized gradient descent until a saturation predicate
/// holds; returns whether it converged within the step cap.
fn normalized_descent(
    params: &mut [f64],
    grad: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    converged: &mut dyn FnMut(&[f64]) -> bool,
    lr: f64,
    max_steps: usize,
) -> bool {
    for _ in 0..max_steps {
        if converged(params) {
            return true;
        }
        let g = grad(params);
        let norm = g.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if norm < 1e-15 {
            return converged(params);
        }
        for (p, gj) in params.iter_mut().zip(&g) {
            *p -= lr * gj / norm;
        }
    }
    converged(params)
}

/// Remap a dataset so each distinct state-action becomes its own state with
/// a single action; the two reward losses only read state-action identity,
/// so they are preserved while the tabular model dimension shrinks.
fn compact_reward_view(ds: &PreferenceDataset) -> Result<(PreferenceDataset, usize)> {
    use std::collections::HashMap;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for pair in ds.pairs() {
        for clip in [&pair.clip_1, &pair.clip_2] {
            for sa in clip.state_actions() {
                let next = index.len();
                index.entry(sa).or_insert(next);
            }
        }
    }
    let remap_clip = |clip: &TrajectoryClip| -> Result<TrajectoryClip> {
        let ks: Vec<usize> =
            clip.state_actions().map(|sa| index[&sa]).collect();
        let steps = ks
            .iter()
            .enumerate()
            .map(|(t, &k)| Step {
                state: k,
                action: 0,
                next_state: ks.get(t + 1).copied().unwrap_or(0),
            })
            .collect();
        TrajectoryClip::new(clip.clip_id, steps)
    };
    let pairs = ds
        .pairs()
        .iter()
        .map(|p| {
            Ok(PreferencePair {
                pair_id: p.pair_id,
                clip_1: remap_clip(&p.clip_1)?,
                clip_2: remap_clip(&p.clip_2)?,
                labels: p.labels.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let compact = PreferenceDataset::new(pairs, ds.clip_length(), ds.link())?;
    Ok((compact, index.len()))
}

/// On overlap-free data, minimizing the label-L1 loss and minimizing the
/// preference loss drive a fully expressive tabular reward model to the
/// same labels. Both routes run to saturation and the induced labels are
/// compared pointwise.
pub fn check_shared_minimizer_reward(n_instances: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("shared-minimizer-reward", 1e-3);
    let saturation = 0.9996;
    for i in 0..n_instances {
        let mut rng = rng_for(seed, 0x100 + i as u64);
        let n = rng.random_range(1..=3usize);
        let t = rng.random_range(1..=2usize);
        let actions = rng.random_range(2..=3usize);
        let states = 2 * n * t + 2;
        let ds = synthetic::no_overlap_dataset(states, actions, n, t, derive_seed(seed, 0x200 + i as u64))?;
        let (compact, dim) = compact_reward_view(&ds)?;
        let fm = FeatureMap::Tabular { states: dim, actions: 1 };
        let quad = LossQuadruple::new(compact, fm, dim, 1, DISCOUNT, LinkLoss::SigmoidNll)?;

        let saturated = |w: &[f64]| w.iter().all(|z| z.tanh().abs() >= saturation);
        let mut w1 = vec![0.0; dim];
        let ok1 = normalized_descent(
            &mut w1,
            &mut |w| quad.reward_label_grad(w),
            &mut |w| saturated(w),
            0.02,
            40_000,
        );
        let mut w2 = vec![0.0; dim];
        let ok2 = normalized_descent(
            &mut w2,
            &mut |w| quad.reward_pref_grad(w),
            &mut |w| saturated(w),
            0.02,
            40_000,
        );
        if !ok1 || !ok2 {
            report.exclude();
            continue;
        }
        let violation = w1
            .iter()
            .zip(&w2)
            .map(|(a, b)| (a.tanh() - b.tanh()).abs())
            .fold(0.0f64, f64::max);
        report.record(violation);
    }
    Ok(report.finish())
}

/// The Bellman analog: fitting Q to binary labels (Bellman backups drive
/// the loss to zero) and the preference-Bellman learner produce the same
/// derived rewards on the dataset transitions.
pub fn check_shared_minimizer_bellman(n_instances: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("shared-minimizer-bellman", 1e-3);
    for i in 0..n_instances {
        let mut rng = rng_for(seed, 0x300 + i as u64);
        let ds = micro_no_overlap(&mut rng, seed, 0x400 + i as u64)?;
        let (states, actions) = dataset_space(&ds);
        let labeled = binary_label(&ds)?;

        // Route A: Bellman backups on the binary labels reach zero loss.
        let mut q3 = QTable::new(states, actions, DISCOUNT, 0.0)?;
        for _ in 0..6000 {
            let mut delta: f64 = 0.0;
            let mut next = q3.clone();
            for t in labeled.tuples() {
                let value = t.reward + DISCOUNT * q3.max_value(t.next_state);
                delta = delta.max((value - q3.get(t.state, t.action)).abs());
                next.set(t.state, t.action, value);
            }
            q3 = next;
            if delta <= 1e-13 {
                break;
            }
        }

        // Route B: the preference-native learner, which never sees the
        // binary labels.
        let config = crate::learner::LearnerConfig::new(
            crate::learner::LearnerKind::PreferenceBellman,
            states,
            actions,
        );
        let (_, q4) = crate::learner::fit_preference_bellman_q(&ds, &config)?;

        // Convergence is judged without reference to the binary answer:
        // the constrained preference optimum pins every dataset derived
        // reward at one of the two boundaries.
        let pinned = labeled.iter().all(|(t, _)| {
            (q4.derived_reward(t.state, t.action, t.next_state).abs() - 1.0).abs() <= 5e-4
        });
        if !pinned {
            report.exclude();
            continue;
        }
        let violation = labeled
            .tuples()
            .iter()
            .map(|t| {
                (q3.derived_reward(t.state, t.action, t.next_state)
                    - q4.derived_reward(t.state, t.action, t.next_state))
                .abs()
            })
            .fold(0.0f64, f64::max);
        report.record(violation);
    }
    Ok(report.finish())
}

fn random_linear_f(rng: &mut ChaCha8Rng) -> LinkLoss {
    LinkLoss::Linear {
        slope: -rng.random_range(0.1..1.5),
        intercept: rng.random_range(-1.0..1.0),
    }
}

fn affine_instance_violation(
    quad: &LossQuadruple,
    bellman: bool,
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let dim = if bellman { quad.q_dim() } else { quad.model_dim() };
    // Q entries stay in [-0.4, 0.4] so the derived-reward bound holds by
    // construction; model weights are free since tanh is always bounded.
    let scale = if bellman { 0.4 } else { 1.0 };
    let params: Vec<Vec<f64>> = (0..points)
        .map(|_| (0..dim).map(|_| rng.random_range(-scale..=scale)).collect())
        .collect();
    let value = |p: &[f64]| {
        if bellman {
            (quad.bellman_label_loss(p), quad.bellman_pref_loss(p))
        } else {
            (quad.reward_label_loss(p), quad.reward_pref_loss(p))
        }
    };
    let (l1_a, l2_a) = value(&params[0]);
    let (l1_b, l2_b) = value(&params[1]);
    if (l2_b - l2_a).abs() < 1e-9 {
        return None;
    }
    let c1 = (l1_b - l1_a) / (l2_b - l2_a);
    let c2 = l1_a - c1 * l2_a;
    let mut violation: f64 = 0.0;
    for p in &params[2..] {
        let (l1, l2) = value(p);
        violation = violation.max((l1 - (c1 * l2 + c2)).abs());
    }
    Some(violation)
}

fn check_affine(
    name: &str,
    bellman: bool,
    control: bool,
    n_instances: usize,
    seed: u64,
) -> Result<CheckReport> {
    let tolerance = if control { 0.0 } else { 1e-9 };
    let mut report = CheckReport::new(name, tolerance);
    if control {
        report = report.control();
    }
    for i in 0..n_instances {
        let mut rng = rng_for(seed, 0x500 + i as u64);
        let n = rng.random_range(2..=4usize);
        let t = rng.random_range(2..=3usize);
        let states = rng.random_range(5..=8usize);
        let actions = rng.random_range(2..=3usize);
        let ds = synthetic::random_dataset(states, actions, n, t, derive_seed(seed, 0x600 + i as u64))?;
        let (s_dim, a_dim) = dataset_space(&ds);
        let f = if control { LinkLoss::SigmoidNll } else { random_linear_f(&mut rng) };
        let fm = FeatureMap::Random {
            states: s_dim,
            actions: a_dim,
            dim: rng.random_range(3..=8),
            seed: derive_seed(seed, 0x700 + i as u64),
        };
        let quad = LossQuadruple::new(ds, fm, s_dim, a_dim, DISCOUNT, f)?;
        match affine_instance_violation(&quad, bellman, 20, &mut rng) {
            None => report.exclude(),
            Some(residual) => {
                if control {
                    // The sigmoid link-loss must break affinity: the check
                    // "passes" only when every instance's residual exceeds
                    // the 1e-3 floor.
                    report.record((1e-3 - residual).max(0.0));
                } else {
                    report.record(residual);
                }
            }
        }
    }
    Ok(report.finish())
}

/// With a linear link-loss, the label-L1 total and the preference total are
/// affinely related across parameter space.
pub fn check_affine_reward(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_affine("affine-equivalence-reward", false, false, n_instances, seed)
}

/// The Bellman analog of the affine equivalence, on bound-respecting Q
/// tables.
pub fn check_affine_bellman(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_affine("affine-equivalence-bellman", true, false, n_instances, seed)
}

/// Negative control: a sigmoid link-loss must break the affine relation.
pub fn check_affine_control(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_affine("affine-control-sigmoid", false, true, n_instances, seed)
}

struct AlignmentOutcome {
    violation: f64,
    skipped: usize,
    resampled: bool,
}

fn alignment_instance(
    seed: u64,
    idx: u64,
    bellman: bool,
    link_loss: LinkLoss,
    fd: bool,
) -> Result<AlignmentOutcome> {
    let mut rng = rng_for(seed, 0x800 + idx);
    let t = rng.random_range(2..=4usize);
    let states = rng.random_range(5..=8usize);
    let actions = rng.random_range(2..=3usize);
    let ds = synthetic::random_dataset(states, actions, 1, t, derive_seed(seed, 0x900 + idx))?;
    let (s_dim, a_dim) = dataset_space(&ds);
    let fm = FeatureMap::Random {
        states: s_dim,
        actions: a_dim,
        dim: rng.random_range(3..=20),
        seed: derive_seed(seed, 0xA00 + idx),
    };
    let quad = LossQuadruple::new(ds.clone(), fm, s_dim, a_dim, DISCOUNT, link_loss)?;

    let dim = if bellman { quad.q_dim() } else { quad.model_dim() };
    let scale = if bellman { 0.4 } else { 0.8 };
    let params: Vec<f64> = (0..dim).map(|_| rng.random_range(-scale..=scale)).collect();

    if bellman {
        // Resample when an argmax is nearly tied: the gradients fix the
        // argmax, so a tie would make the comparison ill-posed.
        let q = QTable::from_flat(&params, s_dim, a_dim, DISCOUNT)?;
        for pair in ds.pairs() {
            for clip in [&pair.clip_1, &pair.clip_2] {
                for st in &clip.steps {
                    let best = q.max_value(st.next_state);
                    let mut runner_up = f64::NEG_INFINITY;
                    for a in 0..a_dim {
                        let v = q.get(st.next_state, a);
                        if a != q.max_action(st.next_state) && v > runner_up {
                            runner_up = v;
                        }
                    }
                    if a_dim > 1 && best - runner_up < 1e-4 {
                        return Ok(AlignmentOutcome { violation: 0.0, skipped: 0, resampled: true });
                    }
                }
            }
        }
    }

    let (g_label, g_pref) = if bellman {
        (quad.bellman_label_grad(&params), quad.bellman_pref_grad(&params))
    } else {
        (quad.reward_label_grad(&params), quad.reward_pref_grad(&params))
    };

    let violation = if fd {
        let label_loss = |p: &[f64]| {
            if bellman {
                quad.bellman_label_loss(p)
            } else {
                quad.reward_label_loss(p)
            }
        };
        let pref_loss = |p: &[f64]| {
            if bellman {
                quad.bellman_pref_loss(p)
            } else {
                quad.reward_pref_loss(p)
            }
        };
        let fd_label = finite_difference_gradient(&label_loss, &params, 1e-5)?;
        let fd_pref = finite_difference_gradient(&pref_loss, &params, 1e-5)?;
        let mut worst = 0.0f64;
        let mut skipped = 0;
        for (a, b) in [(&g_label, &fd_label), (&g_pref, &fd_pref)] {
            match cosine(a, b) {
                Some(c) => worst = worst.max(1.0 - c),
                None => skipped += 1,
            }
        }
        return Ok(AlignmentOutcome { violation: worst, skipped, resampled: false });
    } else {
        match cosine(&g_label, &g_pref) {
            Some(c) => {
                if link_loss.is_decreasing() {
                    1.0 - c
                } else {
                    // Increasing control: the directions must be exactly
                    // opposite.
                    (c - (-1.0)).abs()
                }
            }
            None => {
                let both_zero = g_label.iter().all(|v| v.abs() < 1e-12)
                    && g_pref.iter().all(|v| v.abs() < 1e-12);
                if both_zero {
                    return Ok(AlignmentOutcome { violation: 0.0, skipped: 1, resampled: false });
                }
                1.0
            }
        }
    };
    Ok(AlignmentOutcome { violation, skipped: 0, resampled: false })
}

fn check_alignment(
    name: &str,
    bellman: bool,
    fd: bool,
    control: bool,
    n_instances: usize,
    seed: u64,
) -> Result<CheckReport> {
    let tolerance = if fd { 1e-3 } else { 1e-6 };
    let mut report = CheckReport::new(name, tolerance);
    if control {
        report = report.control();
    }
    let registry = LinkLoss::registry();
    let mut idx = 0u64;
    let mut done = 0usize;
    while done < n_instances {
        let f = if control { LinkLoss::IncreasingControl } else { registry[done % registry.len()] };
        let outcome = alignment_instance(seed, idx, bellman, f, fd)?;
        idx += 1;
        if outcome.resampled {
            // Argmax tie: draw a fresh instance without counting it.
            if idx > 20 * n_instances as u64 {
                report.exclude();
                done += 1;
            }
            continue;
        }
        report.skip(outcome.skipped);
        report.record(outcome.violation);
        done += 1;
    }
    Ok(report.finish())
}

/// Per-pair gradients of the label-L1 and preference losses point the same
/// way for every decreasing link-loss in the registry.
pub fn check_gradient_alignment_reward(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_alignment("gradient-alignment-reward", false, false, false, n_instances, seed)
}

/// The Bellman analog over tabular Q parameters.
pub fn check_gradient_alignment_bellman(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_alignment("gradient-alignment-bellman", true, false, false, n_instances, seed)
}

/// Analytic gradients agree in direction with central finite differences.
pub fn check_gradient_fd_reward(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_alignment("gradient-fd-reward", false, true, false, n_instances, seed)
}

pub fn check_gradient_fd_bellman(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_alignment("gradient-fd-bellman", true, true, false, n_instances, seed)
}

/// Negative control: an increasing link-loss flips the preference gradient
/// exactly opposite to the label gradient.
pub fn check_gradient_alignment_control(n_instances: usize, seed: u64) -> Result<CheckReport> {
    check_alignment("gradient-alignment-control", false, false, true, n_instances, seed)
}

/// All four analytic gradients match central finite differences (step 1e-5)
/// in relative sup-norm error at random points.
pub fn check_gradient_oracle(n_points: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("gradient-oracle", 1e-4);
    for i in 0..n_points {
        let mut rng = rng_for(seed, 0xB00 + i as u64);
        let n = rng.random_range(1..=3usize);
        let t = rng.random_range(2..=3usize);
        let states = rng.random_range(5..=8usize);
        let actions = rng.random_range(2..=3usize);
        let ds = synthetic::random_dataset(states, actions, n, t, derive_seed(seed, 0xC00 + i as u64))?;
        let (s_dim, a_dim) = dataset_space(&ds);
        let fm = FeatureMap::Random {
            states: s_dim,
            actions: a_dim,
            dim: rng.random_range(3..=10),
            seed: derive_seed(seed, 0xD00 + i as u64),
        };
        let quad = LossQuadruple::new(ds, fm, s_dim, a_dim, DISCOUNT, LinkLoss::SigmoidNll)?;

        let w: Vec<f64> = (0..quad.model_dim()).map(|_| rng.random_range(-0.8..=0.8)).collect();
        let q: Vec<f64> = (0..quad.q_dim()).map(|_| rng.random_range(-0.4..=0.4)).collect();

        let mut worst: f64 = 0.0;
        {
            let f = |p: &[f64]| quad.reward_label_loss(p);
            let fd = finite_difference_gradient(&f, &w, 1e-5)?;
            worst = worst.max(relative_error(&quad.reward_label_grad(&w), &fd));
        }
        {
            let f = |p: &[f64]| quad.reward_pref_loss(p);
            let fd = finite_difference_gradient(&f, &w, 1e-5)?;
            worst = worst.max(relative_error(&quad.reward_pref_grad(&w), &fd));
        }
        {
            let f = |p: &[f64]| quad.bellman_label_loss(p);
            let fd = finite_difference_gradient(&f, &q, 1e-5)?;
            worst = worst.max(relative_error(&quad.bellman_label_grad(&q), &fd));
        }
        {
            let f = |p: &[f64]| quad.bellman_pref_loss(p);
            let fd = finite_difference_gradient(&f, &q, 1e-5)?;
            worst = worst.max(relative_error(&quad.bellman_pref_grad(&q), &fd));
        }
        report.record(worst);
    }
    Ok(report.finish())
}

/// Run the complete positive-check suite.
pub fn run_all(instances: usize, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_binary_labels_optimal(instances, seed)?,
        check_shared_minimizer_reward(instances, seed)?,
        check_shared_minimizer_bellman(instances, seed)?,
        check_affine_reward(instances, seed)?,
        check_affine_bellman(instances, seed)?,
        check_gradient_alignment_reward(instances, seed)?,
        check_gradient_alignment_bellman(instances, seed)?,
        check_gradient_fd_reward(instances, seed)?,
        check_gradient_fd_bellman(instances, seed)?,
        check_gradient_oracle(instances.min(40), seed)?,
    ])
}

/// Run the negative controls; these pass when the predicted failure occurs.
pub fn run_controls(instances: usize, seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_affine_control(instances, seed)?,
        check_gradient_alignment_control(instances, seed)?,
    ])
}
