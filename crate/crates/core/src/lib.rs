//! Numerical study of the one-dimensional nonlocal eigenvalue problem
//!
//! ```text
//! λ(α, q) = inf { (∫|u'|² + α |∫|u|^{q-1} u|^{2/q}) / ∫u² : u ∈ H¹₀(a, b) }
//! ```
//!
//! for `1 ≤ q ≤ 2`: the discrete quotient and its minimization, the
//! half-period function `H(m, q)` of sign-changing solutions, closed-form
//! solution branches, and the critical coupling `α_q` beyond which the
//! minimizer is an odd multiple of `sin(πx)`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod critical;
pub mod error;
pub mod grid;
pub mod hfun;
pub mod profile;
pub mod quadrature;
pub mod shooting;
pub mod solver;
pub mod verify;

pub use critical::{alpha_critical, alpha_zero, rescale_lambda, AlphaZero, CriticalResult};
pub use error::{Error, Result};
pub use grid::{q_average, rayleigh_quotient, GridFunction, Interval, ProblemParams};
pub use profile::{analyze, MinimizerProfile, SignClass};
pub use shooting::{branch_point, lambda_from_m, reconstruct_profile, BranchPoint};
pub use solver::{
    el_residual, minimize, saturation_reference, EigenResult, SolverOptions, StartKind,
};
