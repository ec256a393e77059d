//! The critical coupling `α_q` where `λ(α, q)` reaches π², the coupling
//! `α₀(q)` where `λ` vanishes, and the map between intervals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_exponent, Interval, ProblemParams};
use crate::solver::{minimize, minimize_dual, saturation_reference, SolverOptions};

pub const MIN_CRITICAL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub q: f64,
    pub alpha_q: f64,
    /// Final bisection bracket `(lower, upper)`.
    pub bracket: (f64, f64),
    /// Grid counterpart of π² that the predicate compares against.
    pub saturation_value: f64,
    pub tolerance: f64,
    pub solver_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaZero {
    pub q: f64,
    pub alpha_zero: f64,
    pub bracket: (f64, f64),
    /// Minimum of `∫|w'|² / (∫|w|^q)^{2/q}`, which should equal `-α₀`.
    pub dual_minimum: f64,
    pub solver_calls: usize,
}

/// Lower bound `3π² / 2^{1 + 2/q}` for `α_q`, attained at `q = 2`.
pub fn alpha_lower_bound(q: f64) -> f64 {
    3.0 * PI * PI / 2f64.powf(1.0 + 2.0 / q)
}

fn eigenvalue(alpha: f64, q: f64, opts: &SolverOptions, calls: &mut usize) -> Result<f64> {
    *calls += 1;
    Ok(minimize(&ProblemParams::new(alpha, q)?, opts)?.lambda)
}

/// Bisection for the smallest `α` with `λ(α, q) ≥ S - δ`, where `S` is the
/// grid quotient of `sin(πx)` and `δ = 10 |S - π²| + 1e-8`.
///
/// The bracket starts at `[3π²/2^{1+2/q} - max(tol, 1e-3 · bound), 2π²]`;
/// the shift below the bound leaves room for the grid value at `q = 2`,
/// where the bound is attained.
pub fn alpha_critical(q: f64, tol: f64, opts: &SolverOptions) -> Result<CriticalResult> {
    check_exponent(q)?;
    if !(tol >= MIN_CRITICAL_TOL) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be at least {MIN_CRITICAL_TOL}, got {tol}"
        )));
    }
    opts.validate()?;
    let saturation_value = saturation_reference(opts.n, q)?;
    let threshold = saturation_value - (10.0 * (saturation_value - PI * PI).abs() + 1e-8);
    let mut calls = 0;
    let mut saturated =
        |alpha: f64| -> Result<bool> { Ok(eigenvalue(alpha, q, opts, &mut calls)? >= threshold) };

    let bound = alpha_lower_bound(q);
    let (mut lo, mut hi) = (bound - tol.max(1e-3 * bound), 2.0 * PI * PI);
    let (at_lower, at_upper) = (saturated(lo)?, saturated(hi)?);
    if at_lower || !at_upper {
        return Err(Error::BracketViolation {
            lower: lo,
            upper: hi,
            at_lower,
            at_upper,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if saturated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalResult {
        q,
        alpha_q: 0.5 * (lo + hi),
        bracket: (lo, hi),
        saturation_value,
        tolerance: tol,
        solver_calls: calls,
    })
}

/// Root of `λ(α, q) = 0` in `α < 0`, cross-checked against the dual
/// quotient minimum: the two must agree within `tol` relative.
pub fn alpha_zero(q: f64, tol: f64, opts: &SolverOptions) -> Result<AlphaZero> {
    check_exponent(q)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    opts.validate()?;
    // an unconverged dual descent surfaces through the mismatch check
    let dual = minimize_dual(q, opts)?;

    // the dual quotient of the bump bounds -α₀ from above
    let interval = Interval::REFERENCE;
    let bump = crate::grid::GridFunction::sample(interval, opts.n, |x| (0.5 * PI * x).cos())?;
    let h = bump.spacing();
    let energy = bump.dirichlet_energy();
    let power = crate::grid::abs_q_integral(bump.values(), h, q);
    let bump_ratio = energy / power.powf(2.0 / q);

    let mut calls = 0;
    let (mut lo, mut hi) = (-1.01 * bump_ratio, 0.0);
    let at_lower = eigenvalue(lo, q, opts, &mut calls)? >= 0.0;
    if at_lower {
        return Err(Error::BracketViolation {
            lower: lo,
            upper: hi,
            at_lower,
            at_upper: true,
        });
    }
    while hi - lo > 0.1 * tol * lo.abs() {
        let mid = 0.5 * (lo + hi);
        if eigenvalue(mid, q, opts, &mut calls)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if (root + dual.value).abs() > tol * dual.value.abs() {
        return Err(Error::DualityMismatch {
            alpha_zero: root,
            dual_minimum: dual.value,
        });
    }
    Ok(AlphaZero {
        q,
        alpha_zero: root,
        bracket: (lo, hi),
        dual_minimum: dual.value,
        solver_calls: calls,
    })
}

/// `λ(α, q)` on `(a, b)` through the reference problem:
/// `(2/(b-a))² λ(((b-a)/2)^{1+2/q} α, q)`.
pub fn rescale_lambda(a: f64, b: f64, alpha: f64, q: f64, opts: &SolverOptions) -> Result<f64> {
    let half = Interval::new(a, b)?.length() / 2.0;
    let params = ProblemParams::new(half.powf(1.0 + 2.0 / q) * alpha, q)?;
    Ok(minimize(&params, opts)?.lambda / (half * half))
}
