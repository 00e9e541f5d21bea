//! Tabular MDPs, policies, rollouts, and exact return-based evaluation.
//!
//! Everything here is ground truth for the rest of the crate: rewards are
//! bounded in `[-1, 1]`, evaluation is a linear solve rather than Monte
//! Carlo, and all sampling is reproducible from a seed.

mod eval;
mod gridworld;
mod mdp;
mod policy;
mod rollout;
mod solve;
mod trajectory;

pub use eval::{evaluate_policy, exact_return, monte_carlo_return, policy_values, EvalReport};
pub use gridworld::{make_gridworld, make_random_mdp};
pub use mdp::Mdp;
pub use policy::Policy;
pub use rollout::rollout;
pub use solve::{optimal_values, solve_optimal};
pub use trajectory::{validate_chain, Step, TrajectoryClip};

pub(crate) use rollout::rollout_with;
