//! Double-exponential (tanh-sinh) quadrature on (0, 1) for integrands with
//! algebraic endpoint singularities.
//!
//! The substitution `x = (1 + tanh(π/2 sinh t)) / 2` is applied with step
//! `h = 2^-k`; each level reuses the nodes of the previous one and only
//! evaluates the new odd-indexed points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
/// Nodes closer than about 1e-275 to an endpoint are never generated.
const T_MAX: f64 = 6.0;
const SKIPPABLE_DISTANCE: f64 = 1e-200;
/// Abscissae that round to 1 are clamped here for integrands that only see `x`.
const LAST_BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Abscissa, its complement `1 - x` and the weight for parameter `t`.
#[inline]
fn node(t: f64) -> (f64, f64, f64) {
    let u = std::f64::consts::FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u.abs()).exp();
    let (small, large) = (e / (1.0 + e), 1.0 / (1.0 + e));
    let (x, xc) = if u >= 0.0 {
        (large, small)
    } else {
        (small, large)
    };
    let w = std::f64::consts::PI * t.cosh() * x * xc;
    (x, xc, w)
}

struct Levels<F> {
    f: F,
    sum: f64,
    abs_sum: f64,
    evaluations: usize,
}

impl<F: Fn(f64, f64) -> f64> Levels<F> {
    fn add(&mut self, t: f64) -> Result<()> {
        let (x, xc, w) = node(t);
        if w == 0.0 {
            return Ok(());
        }
        let fx = (self.f)(x, xc);
        self.evaluations += 1;
        if !fx.is_finite() {
            if x.min(xc) < SKIPPABLE_DISTANCE {
                return Ok(());
            }
            return Err(Error::NonFinite("quadrature integrand"));
        }
        self.sum += w * fx;
        self.abs_sum += (w * fx).abs();
        Ok(())
    }

    /// Adds the nodes that are new at `level` and returns the estimate.
    fn refine(&mut self, level: usize) -> Result<QuadResult> {
        let h = 0.5f64.powi(level as i32);
        let count = (T_MAX / h).floor() as i64;
        if level == 0 {
            self.add(0.0)?;
            for j in 1..=count {
                self.add(j as f64)?;
                self.add(-(j as f64))?;
            }
        } else {
            for j in (1..=count).step_by(2) {
                let t = j as f64 * h;
                self.add(t)?;
                self.add(-t)?;
            }
        }
        Ok(QuadResult {
            value: h * self.sum,
            error_estimate: f64::INFINITY,
            evaluations: self.evaluations,
        })
    }

    fn roundoff_floor(&self, level: usize) -> f64 {
        16.0 * f64::EPSILON * 0.5f64.powi(level as i32) * self.abs_sum
    }
}

fn check_target(target_rel_err: f64) -> Result<()> {
    if !(1e-14..=1e-4).contains(&target_rel_err) {
        return Err(Error::InvalidParameter(format!(
            "target relative error must lie in [1e-14, 1e-4], got {target_rel_err}"
        )));
    }
    Ok(())
}

/// Estimates at every level `0..=max_level`; the error estimate of level `k`
/// is the difference to level `k - 1`, floored at the roundoff of the sum.
pub fn level_history(f: impl Fn(f64, f64) -> f64, max_level: usize) -> Result<Vec<QuadResult>> {
    let mut levels = Levels {
        f,
        sum: 0.0,
        abs_sum: 0.0,
        evaluations: 0,
    };
    let mut out: Vec<QuadResult> = Vec::with_capacity(max_level + 1);
    for level in 0..=max_level {
        let mut r = levels.refine(level)?;
        if let Some(prev) = out.last() {
            r.error_estimate = (r.value - prev.value)
                .abs()
                .max(levels.roundoff_floor(level));
        }
        out.push(r);
    }
    Ok(out)
}

/// Like [`integrate_endpoint_singular`], but the integrand also receives the
/// complement `1 - x` computed without cancellation, so singular factors such
/// as `(1 - x)^{-1/2}` keep full relative accuracy next to `x = 1`.
pub fn integrate_with_complement(
    f: impl Fn(f64, f64) -> f64,
    target_rel_err: f64,
) -> Result<QuadResult> {
    check_target(target_rel_err)?;
    let mut levels = Levels {
        f,
        sum: 0.0,
        abs_sum: 0.0,
        evaluations: 0,
    };
    let mut prev = levels.refine(0)?;
    let mut best = prev;
    for level in 1..=MAX_LEVEL {
        let mut cur = levels.refine(level)?;
        let diff = (cur.value - prev.value).abs();
        cur.error_estimate = diff.max(levels.roundoff_floor(level));
        best = cur;
        if level >= MIN_LEVEL && (diff <= target_rel_err * cur.value.abs() || diff == 0.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonconvergence {
        best: best.value,
        error_estimate: best.error_estimate,
    })
}

/// Integrates `f` over (0, 1) to the requested relative accuracy, doubling
/// the level until two successive estimates agree.
///
/// `f` only sees the abscissa, which cannot resolve `1 - x` below one ulp; a
/// `(1 - x)^{-1/2}` singularity therefore loses about `2 sqrt(eps)` of mass.
/// Use [`integrate_with_complement`] when the singular factor can be written
/// in terms of `1 - x`.
pub fn integrate_endpoint_singular(
    f: impl Fn(f64) -> f64,
    target_rel_err: f64,
) -> Result<QuadResult> {
    integrate_with_complement(|x, _| f(x.min(LAST_BELOW_ONE)), target_rel_err)
}
