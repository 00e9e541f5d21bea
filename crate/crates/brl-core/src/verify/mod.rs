//! Numerical verification of the labeling/learning equivalences: the
//! optimal-label identity on overlap-free data, shared minimizers, affine
//! equivalence under linear link-losses, gradient-direction equality, and
//! the finite-difference gradient oracle.

mod checks;
mod finite_diff;
mod quadruple;
mod report;

pub use checks::{
    check_affine_bellman, check_affine_control, check_affine_reward,
    check_binary_labels_optimal, check_gradient_alignment_bellman,
    check_gradient_alignment_control, check_gradient_alignment_reward, check_gradient_fd_bellman,
    check_gradient_fd_reward, check_gradient_oracle, check_shared_minimizer_bellman,
    check_shared_minimizer_reward, run_all, run_controls,
};
pub use finite_diff::{cosine, finite_difference_gradient, relative_error};
pub use quadruple::LossQuadruple;
pub use report::CheckReport;
