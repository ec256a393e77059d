//! The half-period function `H(m, q)` of sign-changing solutions, its
//! integrand `h`, the first-integral coefficients `z`, `t`, and the auxiliary
//! functions `g`, `ℓ`, `μ` used to show that `h` increases with `q`.
//!
//! With the normalization `max y = 1`, `min y = -m`, the first integral reads
//! `(y')² = λ [1 - z (1 - |y|^{q-1} y) - y²]`, and the distance between the
//! extrema is `H(m, q) / sqrt(λ)`. Since that distance is 1 on (-1, 1),
//! `λ = H(m, q)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_exponent;
use crate::quadrature::{integrate_with_complement, QuadResult};

pub const DEFAULT_TARGET_REL_ERR: f64 = 1e-10;
/// Radicands down to `-RADICAND_GUARD` are accepted as roundoff.
const RADICAND_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegralCoeffs {
    pub m: f64,
    pub q: f64,
    pub z: f64,
    /// `1 - z`.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HEval {
    pub m: f64,
    pub q: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Value of `h(m, q, y)` together with the two radicals `F_I`, `F_II` of its
/// denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandEval {
    pub value: f64,
    pub f_one: f64,
    pub f_two: f64,
}

fn check_depth(m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "depth m must lie in [0, 1], got {m}"
        )));
    }
    Ok(())
}

fn check_open_depth(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "depth m must lie in (0, 1), got {m}"
        )));
    }
    Ok(())
}

pub fn coeffs(m: f64, q: f64) -> Result<FirstIntegralCoeffs> {
    check_depth(m)?;
    check_exponent(q)?;
    let z = (1.0 - m * m) / (1.0 + m.powf(q));
    Ok(FirstIntegralCoeffs {
        m,
        q,
        z,
        t: 1.0 - z,
    })
}

/// Coefficients evaluated so that both `z` and `t` keep full relative
/// precision (`t` is tiny for small `m`).
#[derive(Clone, Copy)]
struct Radicands {
    m: f64,
    q: f64,
    z: f64,
    t: f64,
    m_q: f64,
}

impl Radicands {
    fn new(m: f64, q: f64) -> Self {
        let m_q = m.powf(q);
        Self {
            m,
            q,
            z: (1.0 - m * m) / (1.0 + m_q),
            t: (m * m + m_q) / (1.0 + m_q),
            m_q,
        }
    }

    /// `1 - y^q` from the complement `s = 1 - y`.
    fn one_minus_pow(&self, s: f64) -> f64 {
        -(self.q * (-s).ln_1p()).exp_m1()
    }

    /// `F_I² = 1 - z (1 - y^q) - y²`.
    fn first(&self, y: f64, s: f64) -> f64 {
        if y <= 0.5 {
            self.t + self.z * y.powf(self.q) - y * y
        } else {
            s * (1.0 + y) - self.z * self.one_minus_pow(s)
        }
    }

    /// `1 / F_I`. At `m = 0` the radicand `y^q - y²` underflows near `y = 0`,
    /// so it is factored as `y^q (1 - y^{2-q})`.
    fn reciprocal_first(&self, y: f64, s: f64) -> f64 {
        if self.m == 0.0 && y <= 0.5 {
            y.powf(-0.5 * self.q) * reciprocal_root(1.0 - y.powf(2.0 - self.q))
        } else {
            reciprocal_root(self.first(y, s))
        }
    }

    /// `F_II² = 1 - z (1 + m^q y^q) - m² y²`.
    fn second(&self, y: f64, s: f64) -> f64 {
        let m2 = self.m * self.m;
        if y <= 0.5 {
            self.t - self.z * self.m_q * y.powf(self.q) - m2 * y * y
        } else {
            self.z * self.m_q * self.one_minus_pow(s) + m2 * s * (1.0 + y)
        }
    }
}

fn guarded_sqrt(radicand: f64, y: f64) -> Result<f64> {
    if radicand < -RADICAND_GUARD || radicand.is_nan() {
        return Err(Error::IntegrandDomain { y, radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `h(m, q, y) = 1 / F_I + m / F_II` for `y ∈ [0, 1)`.
pub fn integrand_h(m: f64, q: f64, y: f64) -> Result<IntegrandEval> {
    check_depth(m)?;
    check_exponent(q)?;
    if !(0.0..1.0).contains(&y) {
        return Err(Error::InvalidParameter(format!(
            "integrand abscissa y must lie in [0, 1), got {y}"
        )));
    }
    let r = Radicands::new(m, q);
    let s = 1.0 - y;
    let f_one = guarded_sqrt(r.first(y, s), y)?;
    let f_two = guarded_sqrt(r.second(y, s), y)?;
    let second_term = if m == 0.0 { 0.0 } else { m / f_two };
    Ok(IntegrandEval {
        value: 1.0 / f_one + second_term,
        f_one,
        f_two,
    })
}

fn reciprocal_root(radicand: f64) -> f64 {
    if radicand > 0.0 {
        1.0 / radicand.sqrt()
    } else if radicand >= -RADICAND_GUARD {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// `H(m, q) = ∫₀¹ h(m, q, y) dy`, each of the two terms integrated separately.
#[allow(non_snake_case)]
pub fn H(m: f64, q: f64, target_rel_err: f64) -> Result<HEval> {
    check_depth(m)?;
    check_exponent(q)?;
    if m == 0.0 && q == 2.0 {
        return Err(Error::Divergent("H(0, 2) is infinite"));
    }
    let r = Radicands::new(m, q);
    let first: QuadResult =
        integrate_with_complement(|y, s| r.reciprocal_first(y, s), target_rel_err)?;
    let (second_value, second_error) = if m == 0.0 {
        (0.0, 0.0)
    } else {
        let second =
            integrate_with_complement(|y, s| m * reciprocal_root(r.second(y, s)), target_rel_err)?;
        (second.value, second.error_estimate)
    };
    Ok(HEval {
        m,
        q,
        value: first.value + second_value,
        error_estimate: first.error_estimate + second_error,
    })
}

/// Half-lengths of the positive and negative arcs scaled by `sqrt(λ)`:
/// `∫₀¹ dy / F_I` and `∫₀¹ m dy / F_II`.
pub(crate) fn arc_integrals(m: f64, q: f64, target_rel_err: f64) -> Result<(f64, f64)> {
    let r = Radicands::new(m, q);
    let first = integrate_with_complement(|y, s| r.reciprocal_first(y, s), target_rel_err)?;
    let second =
        integrate_with_complement(|y, s| m * reciprocal_root(r.second(y, s)), target_rel_err)?;
    Ok((first.value, second.value))
}

/// `F_I²` and `F_II²` at `y = sin θ`, with `1 - y` evaluated from `cos θ`.
pub(crate) fn radicands_on_circle(m: f64, q: f64, theta: f64) -> (f64, f64) {
    let r = Radicands::new(m, q);
    let (y, c) = theta.sin_cos();
    let s = c * c / (1.0 + y);
    (r.first(y, s), r.second(y, s))
}

fn check_lemma_args(m: f64, q: f64) -> Result<()> {
    check_open_depth(m)?;
    check_exponent(q)
}

/// The function `g(m, q, y)` whose positivity on `y ∈ (0, 1)` closes the
/// monotonicity argument for `h` in `q`.
pub fn lemma_g(m: f64, q: f64, y: f64) -> Result<f64> {
    check_lemma_args(m, q)?;
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "g requires y in (0, 1], got {y}"
        )));
    }
    let (ln_m, ln_y) = (m.ln(), y.ln());
    let (m_q, y_q) = (m.powf(q), y.powf(q));
    let first = -(1.0 - y_q) * m_q * ln_m - y_q * (1.0 + m_q) * ln_y;
    let second = (y_q - 1.0) * ln_m + (1.0 + m_q) * y_q * ln_y;
    Ok(first + second * m.powf(q - 2.0))
}

/// `ℓ(m, q) = (m^q + m^{q-2}) log(1/m) / ((1 + m^q)(m^{q-2} - 1))`.
///
/// The denominator vanishes at `q = 2`, where `ℓ = +∞`.
pub fn lemma_ell(m: f64, q: f64) -> Result<f64> {
    check_lemma_args(m, q)?;
    let (m_q, m_q2) = (m.powf(q), m.powf(q - 2.0));
    Ok((m_q + m_q2) * (-m.ln()) / ((1.0 + m_q) * (m_q2 - 1.0)))
}

/// `μ(m, q) = (m^q + m^{q-2}) log(1/m) - (1 + m^q)(m^{q-2} - 1)`; `ℓ > 1`
/// is equivalent to `μ > 0`.
pub fn lemma_mu(m: f64, q: f64) -> Result<f64> {
    check_lemma_args(m, q)?;
    let (m_q, m_q2) = (m.powf(q), m.powf(q - 2.0));
    Ok((m_q + m_q2) * (-m.ln()) - (1.0 + m_q) * (m_q2 - 1.0))
}
