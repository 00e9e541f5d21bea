//! Exact policy evaluation and normalized scoring.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::env::rollout::{check_shapes, rollout_with};
use crate::env::solve::solve_optimal;
use crate::env::{Mdp, Policy};
use crate::error::{Error, Result};
use crate::rng::rng_for;

/// Evaluation summary for a policy on an MDP.
///
/// `normalized_score` is `100 * (J(pi) - J(random)) / (J(expert) - J(random))`
/// where the random baseline is the uniform policy and the expert baseline
/// is the value-iteration optimum, both evaluated exactly. `episodes` is the
/// number of sampled episodes, 0 when the return was computed in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mean_return: f64,
    pub std_return: f64,
    pub normalized_score: f64,
    pub episodes: usize,
}

/// Expected discounted return `J(pi)` and per-state values, by solving the
/// linear evaluation system `(I - gamma * P_pi) V = R_pi`.
pub fn policy_values(mdp: &Mdp, policy: &Policy) -> Result<Vec<f64>> {
    check_shapes(mdp, policy)?;
    let n = mdp.state_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for s in 0..n {
        let probs = policy.action_probs(s);
        for (action, &pa) in probs.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            b[s] += pa * mdp.reward(s, action);
            let row = mdp.transition_row(s, action);
            for (s2, &p) in row.iter().enumerate() {
                a[(s, s2)] -= mdp.discount() * pa * p;
            }
        }
    }
    let lu = a.lu();
    let v = lu
        .solve(&b)
        .ok_or_else(|| Error::Internal("singular policy evaluation system".into()))?;
    Ok(v.iter().copied().collect())
}

/// Exact expected return from the initial distribution.
pub fn exact_return(mdp: &Mdp, policy: &Policy) -> Result<f64> {
    let v = policy_values(mdp, policy)?;
    Ok(weighted_mean(mdp.initial_distribution(), &v))
}

fn weighted_mean(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

/// Evaluate a policy exactly and report its normalized score.
pub fn evaluate_policy(mdp: &Mdp, policy: &Policy) -> Result<EvalReport> {
    let values = policy_values(mdp, policy)?;
    let init = mdp.initial_distribution();
    let mean_return = weighted_mean(init, &values);
    let var = init
        .iter()
        .zip(&values)
        .map(|(w, v)| w * (v - mean_return).powi(2))
        .sum::<f64>()
        .max(0.0);

    let expert = solve_optimal(mdp, 1e-10)?;
    let j_expert = exact_return(mdp, &expert)?;
    let j_random = exact_return(mdp, &Policy::uniform(mdp.state_count(), mdp.action_count()))?;
    let denom = j_expert - j_random;
    if denom.abs() < 1e-12 {
        return Err(Error::Internal(
            "degenerate normalization: expert and random returns coincide".into(),
        ));
    }
    Ok(EvalReport {
        mean_return,
        std_return: var.sqrt(),
        normalized_score: 100.0 * (mean_return - j_random) / denom,
        episodes: 0,
    })
}

/// Monte Carlo estimate of the discounted return, used as an independent
/// cross-check of the exact evaluation. Returns `(mean, standard_error)`.
pub fn monte_carlo_return(
    mdp: &Mdp,
    policy: &Policy,
    episodes: usize,
    horizon: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if episodes == 0 || horizon == 0 {
        return Err(Error::param("episodes and horizon must be positive"));
    }
    check_shapes(mdp, policy)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for ep in 0..episodes {
        let mut rng = rng_for(seed, ep as u64);
        let steps = rollout_with(mdp, policy, horizon, &mut rng);
        let mut ret = 0.0;
        let mut disc = 1.0;
        for st in &steps {
            ret += disc * mdp.reward(st.state, st.action);
            disc *= mdp.discount();
        }
        sum += ret;
        sum_sq += ret * ret;
    }
    let n = episodes as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::make_gridworld;

    #[test]
    fn optimal_policy_scores_100() {
        let mdp = make_gridworld(4, 4, 1.0, -0.01, 0.1, 0).unwrap();
        let expert = solve_optimal(&mdp, 1e-10).unwrap();
        let report = evaluate_policy(&mdp, &expert).unwrap();
        assert!((report.normalized_score - 100.0).abs() < 1e-6);
        assert_eq!(report.episodes, 0);
    }

    #[test]
    fn uniform_policy_scores_0() {
        let mdp = make_gridworld(4, 4, 1.0, -0.01, 0.1, 0).unwrap();
        let report = evaluate_policy(&mdp, &Policy::uniform(16, 4)).unwrap();
        assert!(report.normalized_score.abs() < 1e-6);
    }

    #[test]
    fn epsilon_greedy_scores_strictly_between() {
        let mdp = make_gridworld(5, 5, 1.0, -0.01, 0.1, 0).unwrap();
        let expert = solve_optimal(&mdp, 1e-10).unwrap();
        let behavior = expert.epsilon_greedy(0.5).unwrap();
        let score = evaluate_policy(&mdp, &behavior).unwrap().normalized_score;
        assert!(score > 0.0 && score < 100.0, "score {score}");
    }

    #[test]
    fn normalized_score_matches_recomputation_from_returns() {
        let mdp = make_gridworld(4, 4, 1.0, -0.01, 0.2, 0).unwrap();
        let policy = solve_optimal(&mdp, 1e-10).unwrap().epsilon_greedy(0.3).unwrap();
        let report = evaluate_policy(&mdp, &policy).unwrap();
        let j = exact_return(&mdp, &policy).unwrap();
        let j_exp = exact_return(&mdp, &solve_optimal(&mdp, 1e-10).unwrap()).unwrap();
        let j_rand = exact_return(&mdp, &Policy::uniform(16, 4)).unwrap();
        let recomputed = 100.0 * (j - j_rand) / (j_exp - j_rand);
        assert!((report.normalized_score - recomputed).abs() < 1e-9);
    }

    #[test]
    fn exact_return_agrees_with_monte_carlo() {
        // Small grid with gamma 0.9 keeps the truncation bias far below the
        // Monte Carlo standard error.
        let mut mdp = make_gridworld(2, 2, 1.0, -0.05, 0.2, 0).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&mdp.to_json().unwrap()).unwrap();
        let mut doc = doc;
        doc["gamma"] = serde_json::json!(0.9);
        mdp = Mdp::from_json(&doc.to_string()).unwrap();

        let policy = Policy::uniform(4, 4);
        let exact = exact_return(&mdp, &policy).unwrap();
        let (mc, se) = monte_carlo_return(&mdp, &policy, 100_000, 220, 5).unwrap();
        assert!(
            (exact - mc).abs() <= 3.0 * se,
            "exact {exact} vs mc {mc} (3 se = {})",
            3.0 * se
        );
    }
}
