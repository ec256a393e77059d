//! Problem parameters, Dirichlet grid functions and the discrete functionals
//! that make up the nonlocal Rayleigh quotient.
//!
//! All integrals use one fixed composite rule on a uniform grid with `n`
//! interior nodes and implicit zero boundary values:
//!
//! * Dirichlet energy: `D(u) = sum_{i=0}^{n} (u_{i+1} - u_i)^2 / h`
//! * mass: `M(u) = h * sum u_i^2`
//! * q-average: `S(u) = h * sum |u_i|^{q-1} u_i`
//!
//! Every term of the quotient is exactly 2-homogeneous under this rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub const REFERENCE: Interval = Interval { a: -1.0, b: 1.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite("interval endpoints"));
        }
        if a >= b {
            return Err(Error::InvalidParameter(format!(
                "interval requires a < b, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Spacing of a uniform grid with `n` interior nodes.
    pub fn spacing(&self, n: usize) -> f64 {
        self.length() / (n as f64 + 1.0)
    }

    /// Abscissa of interior node `i` (zero-based).
    pub fn node(&self, n: usize, i: usize) -> f64 {
        self.a + (i as f64 + 1.0) * self.spacing(n)
    }

    /// Maps a point of the interval onto the reference interval (-1, 1).
    pub fn to_reference(&self, x: f64) -> f64 {
        2.0 * (x - self.a) / self.length() - 1.0
    }
}

impl Default for Interval {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// A full problem instance: coupling `alpha`, exponent `q` and the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub alpha: f64,
    pub q: f64,
    pub interval: Interval,
}

impl ProblemParams {
    /// Parameters on the reference interval (-1, 1).
    pub fn new(alpha: f64, q: f64) -> Result<Self> {
        Self::on_interval(alpha, q, Interval::REFERENCE)
    }

    pub fn on_interval(alpha: f64, q: f64, interval: Interval) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        check_exponent(q)?;
        let interval = Interval::new(interval.a, interval.b)?;
        Ok(Self { alpha, q, interval })
    }
}

pub(crate) fn check_exponent(q: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "exponent q must lie in [1, 2], got {q}"
        )));
    }
    Ok(())
}

/// Nodal values of a function vanishing at both ends of `interval`.
///
/// Only interior nodes are stored; the boundary values are zero by
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    interval: Interval,
    values: Vec<f64>,
}

pub const MIN_NODES: usize = 3;

impl GridFunction {
    pub fn new(interval: Interval, values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "a grid function needs at least {MIN_NODES} interior nodes, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid function values"));
        }
        Ok(Self { interval, values })
    }

    /// Samples `f` at the interior nodes of a uniform grid on `interval`.
    pub fn sample(interval: Interval, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|i| f(interval.node(n, i))).collect();
        Self::new(interval, values)
    }

    pub(crate) fn from_raw(interval: Interval, values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= MIN_NODES);
        Self { interval, values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn spacing(&self) -> f64 {
        self.interval.spacing(self.n())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).map(move |i| self.interval.node(n, i))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            interval: self.interval,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dirichlet_energy(&self) -> f64 {
        dirichlet_energy(&self.values, self.spacing())
    }

    pub fn mass(&self) -> f64 {
        mass(&self.values, self.spacing())
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// Rescales to unit mass. Fails on the zero function.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if m <= 0.0 {
            return Err(Error::DegenerateInput("zero function cannot be normalized"));
        }
        Ok(self.scaled(1.0 / m.sqrt()))
    }

    /// L² distance to another function on the same grid.
    pub fn l2_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.n() != other.n() || self.interval != other.interval {
            return Err(Error::InvalidParameter(
                "grid functions live on different grids".into(),
            ));
        }
        let h = self.spacing();
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((h * s).sqrt())
    }

    /// Piecewise-linear interpolant with zero boundary values; zero outside
    /// the interval.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.n();
        let h = self.spacing();
        let s = (x - self.interval.a) / h;
        if !(s > 0.0 && s < n as f64 + 1.0) {
            return 0.0;
        }
        let k = s.floor() as usize;
        let frac = s - k as f64;
        let at = |j: usize| {
            if j == 0 || j > n {
                0.0
            } else {
                self.values[j - 1]
            }
        };
        (1.0 - frac) * at(k) + frac * at(k + 1)
    }
}

/// `|s|^{q-1} s`, the odd power appearing in the q-average.
#[inline]
pub fn signed_power(s: f64, q: f64) -> f64 {
    if q == 1.0 {
        s
    } else if q == 2.0 {
        s * s.abs()
    } else {
        s.abs().powf(q - 1.0) * s
    }
}

/// `|s|^{q-1}` with the convention `|0|^0 = 1`.
#[inline]
pub(crate) fn abs_power(s: f64, q: f64) -> f64 {
    if q == 1.0 {
        1.0
    } else if q == 2.0 {
        s.abs()
    } else {
        s.abs().powf(q - 1.0)
    }
}

pub(crate) fn dirichlet_energy(u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut acc = u[0] * u[0] + u[n - 1] * u[n - 1];
    for w in u.windows(2) {
        let d = w[1] - w[0];
        acc += d * d;
    }
    acc / h
}

pub(crate) fn mass(u: &[f64], h: f64) -> f64 {
    h * u.iter().map(|v| v * v).sum::<f64>()
}

pub(crate) fn q_average_raw(u: &[f64], h: f64, q: f64) -> f64 {
    h * u.iter().map(|&v| signed_power(v, q)).sum::<f64>()
}

pub(crate) fn abs_q_integral(u: &[f64], h: f64, q: f64) -> f64 {
    h * u.iter().map(|&v| v.abs().powf(q)).sum::<f64>()
}

/// The nonlocal term `|S|^{2/q}`.
#[inline]
pub(crate) fn nonlocal_term(s: f64, q: f64) -> f64 {
    if q == 2.0 {
        s.abs()
    } else if q == 1.0 {
        s * s
    } else {
        s.abs().powf(2.0 / q)
    }
}

/// Signed q-average `S(u) = ∫ |u|^{q-1} u dx`.
pub fn q_average(u: &GridFunction, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(q_average_raw(u.values(), u.spacing(), q))
}

/// `(D(u) + alpha |S(u)|^{2/q}) / M(u)` on the grid of `u`.
///
/// The exponent and coupling come from `params`; the grid (and therefore the
/// interval) is the one `u` lives on.
pub fn rayleigh_quotient(u: &GridFunction, params: &ProblemParams) -> Result<f64> {
    check_exponent(params.q)?;
    if !params.alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    let h = u.spacing();
    let m = mass(u.values(), h);
    if m == 0.0 {
        return Err(Error::DegenerateInput(
            "zero function has no Rayleigh quotient",
        ));
    }
    let d = dirichlet_energy(u.values(), h);
    let s = q_average_raw(u.values(), h, params.q);
    let value = (d + params.alpha * nonlocal_term(s, params.q)) / m;
    if !value.is_finite() {
        return Err(Error::NonFinite("Rayleigh quotient"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const N: usize = 4000;

    fn sine() -> GridFunction {
        GridFunction::sample(Interval::REFERENCE, N, |x| (PI * x).sin()).unwrap()
    }

    fn bump() -> GridFunction {
        GridFunction::sample(Interval::REFERENCE, N, |x| (0.5 * PI * x).cos()).unwrap()
    }

    #[test]
    fn sine_quotient_is_pi_squared() {
        for q in [1.0, 1.5, 2.0] {
            let p = ProblemParams::new(3.0, q).unwrap();
            let r = rayleigh_quotient(&sine(), &p).unwrap();
            assert!((r - PI * PI).abs() < 1e-4 * PI * PI, "q={q}: {r}");
        }
    }

    #[test]
    fn bump_quotient_is_poincare_constant() {
        for q in [1.0, 1.5, 2.0] {
            let p = ProblemParams::new(0.0, q).unwrap();
            let r = rayleigh_quotient(&bump(), &p).unwrap();
            assert!((r - PI * PI / 4.0).abs() < 1e-5, "{r}");
        }
    }

    #[test]
    fn quadratic_exponent_adds_alpha_on_positive_functions() {
        let u = bump();
        let base = rayleigh_quotient(&u, &ProblemParams::new(0.0, 2.0).unwrap()).unwrap();
        let shifted = rayleigh_quotient(&u, &ProblemParams::new(1.0, 2.0).unwrap()).unwrap();
        assert!((shifted - base - 1.0).abs() < 1e-13);
        assert!((shifted - (PI * PI / 4.0 + 1.0)).abs() < 1e-5);
    }

    #[test]
    fn odd_function_has_zero_average() {
        for q in [1.0, 1.3, 2.0] {
            assert!(q_average(&sine(), q).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn q1_average_of_bump() {
        // exact: ∫ cos(πx/2) = 4/π
        let s = q_average(&bump(), 1.0).unwrap();
        assert!((s - 4.0 / PI).abs() < 1e-6, "{s}");
    }

    #[test]
    fn quotient_independent_of_q_without_coupling() {
        let u =
            GridFunction::sample(Interval::REFERENCE, 500, |x| (1.0 - x * x) * (x + 0.3)).unwrap();
        let vals: Vec<f64> = [1.0, 1.5, 2.0]
            .iter()
            .map(|&q| rayleigh_quotient(&u, &ProblemParams::new(0.0, q).unwrap()).unwrap())
            .collect();
        assert!((vals[0] - vals[1]).abs() <= 1e-15 * vals[0]);
        assert!((vals[0] - vals[2]).abs() <= 1e-15 * vals[0]);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let zero = GridFunction::new(Interval::REFERENCE, vec![0.0; 10]).unwrap();
        let p = ProblemParams::new(1.0, 1.5).unwrap();
        assert!(matches!(
            rayleigh_quotient(&zero, &p),
            Err(Error::DegenerateInput(_))
        ));
        assert!(GridFunction::new(Interval::REFERENCE, vec![1.0, f64::NAN, 0.0]).is_err());
        assert!(GridFunction::new(Interval::REFERENCE, vec![1.0, 2.0]).is_err());
        assert!(ProblemParams::new(1.0, 2.5).is_err());
        assert!(ProblemParams::new(1.0, 0.9).is_err());
        assert!(ProblemParams::on_interval(1.0, 1.5, Interval { a: 1.0, b: 1.0 }).is_err());
    }

    #[test]
    fn interpolation_reproduces_nodes_and_vanishes_outside() {
        let u = bump();
        let n = u.n();
        for i in [0, 17, n / 2, n - 1] {
            let x = u.interval().node(n, i);
            assert!((u.interpolate(x) - u.values()[i]).abs() < 1e-12);
        }
        assert_eq!(u.interpolate(-1.5), 0.0);
        assert!(u.interpolate(1.0).abs() < 1e-12);
    }
}
