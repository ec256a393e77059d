//! Closed-form and first-integral solution branches on (-1, 1).
//!
//! A sign-changing solution normalized to `max y = 1`, `min y = -m` obeys
//! `(y')² = λ [1 - z (1 - |y|^{q-1} y) - y²]` with `λ = H(m, q)²`. The
//! profile is rebuilt by inverting `x(y)` on each monotone arc. For `q = 1`
//! the constant-sign branch and the family `y_A` at `α = π²/2` are explicit.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Interval};
use crate::hfun::{self, arc_integrals, radicands_on_circle, DEFAULT_TARGET_REL_ERR};
use crate::solver::MIN_SOLVER_NODES;

/// Points of the angular mesh `y = sin θ` used to invert `x(y)`.
const ANGLE_MESH: usize = 2048;

/// 8-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Parameters of the sign-changing branch at depth `m_bar`. The coupling
/// only enters through the product `γα`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub q: f64,
    pub m_bar: f64,
    pub lambda: f64,
    /// `γα = (qλ/2) z(m̄, q)`.
    pub gamma_alpha: f64,
    /// First-integral constant `c = (λ/2) t(m̄, q)`.
    pub c: f64,
}

fn check_branch_depth(m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "depth m must lie in (0, 1], got {m}"
        )));
    }
    Ok(())
}

pub fn lambda_from_m(m: f64, q: f64) -> Result<f64> {
    check_branch_depth(m)?;
    let h = hfun::H(m, q, DEFAULT_TARGET_REL_ERR)?.value;
    Ok(h * h)
}

pub fn branch_point(m: f64, q: f64) -> Result<BranchPoint> {
    let lambda = lambda_from_m(m, q)?;
    let c = hfun::coeffs(m, q)?;
    Ok(BranchPoint {
        q,
        m_bar: m,
        lambda,
        gamma_alpha: 0.5 * q * lambda * c.z,
        c: 0.5 * lambda * c.t,
    })
}

/// Monotone cubic (Fritsch-Carlson) interpolant through increasing `xs`.
struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let k = xs.len();
        let secants: Vec<f64> = (0..k - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; k];
        slopes[0] = secants[0];
        slopes[k - 1] = secants[k - 2];
        for i in 1..k - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            if d0 * d1 > 0.0 {
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w0, w1) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                slopes[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
            }
        }
        Self { xs, ys, slopes }
    }

    fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        let x = x.clamp(self.xs[0], self.xs[last]);
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, last) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.ys[i]
            + (s3 - 2.0 * s2 + s) * h * self.slopes[i]
            + (-2.0 * s3 + 3.0 * s2) * self.ys[i + 1]
            + (s3 - s2) * h * self.slopes[i + 1]
    }
}

/// `∫₀^θ weight cos φ / sqrt(radicand(φ)) dφ` on a uniform θ-mesh of
/// `[0, π/2]`, as an interpolant `θ(X)`.
fn angle_of_distance(weight: f64, radicand: impl Fn(f64) -> f64) -> Result<Pchip> {
    let step = FRAC_PI_2 / (ANGLE_MESH - 1) as f64;
    let integrand = |phi: f64| -> Result<f64> {
        let r = radicand(phi);
        if !(r > 0.0) {
            return Err(Error::IntegrandDomain {
                y: phi.sin(),
                radicand: r,
            });
        }
        Ok(weight * phi.cos() / r.sqrt())
    };
    let mut thetas = Vec::with_capacity(ANGLE_MESH);
    let mut distances = Vec::with_capacity(ANGLE_MESH);
    let mut acc = 0.0;
    thetas.push(0.0);
    distances.push(0.0);
    for j in 1..ANGLE_MESH {
        let centre = (j as f64 - 0.5) * step;
        let mut piece = 0.0;
        for (&node, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            let offset = 0.5 * step * node;
            piece += w * (integrand(centre - offset)? + integrand(centre + offset)?);
        }
        acc += 0.5 * step * piece;
        thetas.push(j as f64 * step);
        distances.push(acc);
    }
    Ok(Pchip::new(distances, thetas))
}

/// Samples of the sign-changing solution with maximum 1 and minimum `-m` on
/// `n` interior nodes of (-1, 1). The positive arc occupies the left part:
/// the profile rises from `y(-1) = 0`, returns to zero at `-1 + 2ℓ₊` and
/// reaches `-m` halfway through the remaining length.
pub fn reconstruct_profile(m: f64, q: f64, n: usize) -> Result<GridFunction> {
    check_branch_depth(m)?;
    crate::grid::check_exponent(q)?;
    if n < MIN_SOLVER_NODES {
        return Err(Error::InvalidParameter(format!(
            "profile needs at least {MIN_SOLVER_NODES} nodes, got {n}"
        )));
    }
    let (first, second) = arc_integrals(m, q, DEFAULT_TARGET_REL_ERR)?;
    let root_lambda = first + second;
    let (half_pos, half_neg) = (first / root_lambda, second / root_lambda);

    let positive = angle_of_distance(1.0 / root_lambda, |t| radicands_on_circle(m, q, t).0)?;
    let negative = angle_of_distance(m / root_lambda, |t| radicands_on_circle(m, q, t).1)?;

    GridFunction::sample(Interval::REFERENCE, n, |x| {
        let d = x + 1.0;
        if d <= 2.0 * half_pos {
            positive.eval(d.min(2.0 * half_pos - d)).sin()
        } else {
            let e = d - 2.0 * half_pos;
            -m * negative.eval(e.min(2.0 * half_neg - e)).sin()
        }
    })
}

fn check_q1_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.25 * PI * PI && lambda < PI * PI) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (π²/4, π²) on the q = 1 constant-sign branch, got {lambda}"
        )));
    }
    Ok(())
}

/// Coupling of the constant-sign `q = 1` solution with eigenvalue `λ`:
/// `α = λ√λ / (2√λ - 2 tan √λ)`.
pub fn q1_alpha_of_lambda(lambda: f64) -> Result<f64> {
    check_q1_lambda(lambda)?;
    let s = lambda.sqrt();
    Ok(lambda * s / (2.0 * s - 2.0 * s.tan()))
}

/// `(α/λ)(1 - cos(√λ x) / cos √λ)`, the `q = 1` solution with `γ = 1`.
pub fn q1_positive_profile(lambda: f64, n: usize) -> Result<GridFunction> {
    let alpha = q1_alpha_of_lambda(lambda)?;
    let s = lambda.sqrt();
    let cs = s.cos();
    GridFunction::sample(Interval::REFERENCE, n, |x| {
        alpha / lambda * (1.0 - (s * x).cos() / cs)
    })
}

/// `y_A(x) = (A/2)(1 + cos πx) - sqrt(1 - A) sin πx`.
pub fn q1_family_y_a(a: f64, n: usize) -> Result<GridFunction> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "A must lie in [0, 1], got {a}"
        )));
    }
    let b = (1.0 - a).sqrt();
    GridFunction::sample(Interval::REFERENCE, n, |x| {
        0.5 * a * (1.0 + (PI * x).cos()) - b * (PI * x).sin()
    })
}
