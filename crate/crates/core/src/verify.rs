//! Self-verification suite: twelve numerical checks of the exact statements
//! about `λ(α, q)`, each with its tolerance and time budget.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::critical::{alpha_critical, alpha_lower_bound, alpha_zero, rescale_lambda};
use crate::error::Result;
use crate::grid::{rayleigh_quotient, GridFunction, Interval, ProblemParams};
use crate::hfun::{integrand_h, lemma_ell, lemma_g, lemma_mu, DEFAULT_TARGET_REL_ERR, H};
use crate::profile::{analyze, SignClass};
use crate::shooting::{q1_alpha_of_lambda, q1_family_y_a, reconstruct_profile};
use crate::solver::{minimize, minimize_dual, SolverOptions};

const PI2: f64 = PI * PI;
/// Bisection tolerance for the critical coupling and the zero crossing.
pub const SEARCH_TOL: f64 = 1e-3;

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "Poincaré baseline"),
    (2, "H closed forms"),
    (3, "monotonicity of h and lemma functions"),
    (4, "critical constants"),
    (5, "saturation and symmetry transition"),
    (6, "q = 2 linear branch"),
    (7, "q = 1 branch oracle"),
    (8, "Lipschitz and monotone structure"),
    (9, "lower bound for the critical coupling"),
    (10, "duality at the zero crossing"),
    (11, "interval rescaling"),
    (12, "solver and shooting agreement"),
];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

/// Collects failed conditions and a few headline numbers.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn within_budget(&mut self, start: Instant, budget: Duration, what: &str) {
        let spent = start.elapsed();
        self.require(spent <= budget, || {
            format!(
                "{what} took {:.2} s, budget {:.0} s",
                spent.as_secs_f64(),
                budget.as_secs_f64()
            )
        });
    }

    fn finish(self) -> (bool, String) {
        if self.failures.is_empty() {
            (true, self.notes.join("; "))
        } else {
            (false, self.failures.join("; "))
        }
    }
}

fn rel(value: f64, expected: f64) -> f64 {
    ((value - expected) / expected).abs()
}

fn lambda(alpha: f64, q: f64, opts: &SolverOptions) -> Result<f64> {
    Ok(minimize(&ProblemParams::new(alpha, q)?, opts)?.lambda)
}

fn poincare_baseline(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    for q in [1.0, 1.5, 2.0] {
        let start = Instant::now();
        let l = lambda(0.0, q, opts)?;
        let err = rel(l, 0.25 * PI2);
        c.require(err < 1e-4, || {
            format!("q = {q}: λ = {l}, relative error {err:.2e}")
        });
        c.within_budget(start, Duration::from_secs(5), &format!("q = {q}"));
        c.note(format!("q={q}: {err:.1e}"));
    }
    Ok(c)
}

fn q2_closed_form(m: f64) -> f64 {
    0.5 * PI * ((1.0 + m * m) / 2.0).sqrt() * (1.0 / m + 1.0)
}

fn h_closed_forms() -> Result<Checks> {
    let mut c = Checks::default();
    let start = Instant::now();
    let depths: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    for &m in &depths {
        let v = H(m, 1.0, DEFAULT_TARGET_REL_ERR)?.value;
        worst = worst.max(rel(v, PI));
        c.require(rel(v, PI) < 1e-9, || format!("H({m}, 1) = {v}"));
        let v = H(m, 2.0, DEFAULT_TARGET_REL_ERR)?.value;
        let expected = q2_closed_form(m);
        c.require(rel(v, expected) < 1e-8, || {
            format!("H({m}, 2) = {v}, closed form {expected}")
        });
    }
    for q in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let v = H(1.0, q, DEFAULT_TARGET_REL_ERR)?.value;
        worst = worst.max(rel(v, PI));
        c.require(rel(v, PI) < 1e-9, || format!("H(1, {q}) = {v}"));
    }
    for q in [1.0, 1.25, 1.5, 1.75] {
        let v = H(0.0, q, DEFAULT_TARGET_REL_ERR)?.value;
        let expected = PI / (2.0 - q);
        c.require((v - expected).abs() < 1e-8, || {
            format!("H(0, {q}) = {v}, expected {expected}")
        });
    }
    c.within_budget(start, Duration::from_secs(1), "H evaluations");
    c.note(format!("worst |H/π - 1| = {worst:.1e}"));
    Ok(c)
}

fn monotonicity() -> Result<Checks> {
    let mut c = Checks::default();
    let start = Instant::now();
    let depths: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let abscissae: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
    let exponents = [1.0, 1.25, 1.5, 1.75, 2.0];
    for &m in &depths {
        for &y in &abscissae {
            let values = exponents
                .iter()
                .map(|&q| Ok(integrand_h(m, q, y)?.value))
                .collect::<Result<Vec<f64>>>()?;
            c.require(values.windows(2).all(|w| w[1] > w[0]), || {
                format!("h({m}, ·, {y}) not increasing: {values:?}")
            });
        }
        for &q in &exponents[1..] {
            let e = H(m, q, DEFAULT_TARGET_REL_ERR)?;
            c.require(e.value - PI > 10.0 * e.error_estimate, || {
                format!(
                    "H({m}, {q}) = {} not above π by 10 error estimates",
                    e.value
                )
            });
        }
    }
    for m in [0.3, 0.7] {
        for q in [1.2, 1.9] {
            let g = lemma_g(m, q, 1.0)?;
            c.require(g.abs() < 1e-12, || format!("g({m}, {q}, 1) = {g:e}"));
        }
    }
    let mut min_mu = f64::INFINITY;
    for &m in &depths {
        for q in [1.25, 1.5, 1.75] {
            for &y in &abscissae {
                let g = lemma_g(m, q, y)?;
                c.require(g > 0.0, || format!("g({m}, {q}, {y}) = {g:e}"));
            }
            let mu = lemma_mu(m, q)?;
            let ell = lemma_ell(m, q)?;
            min_mu = min_mu.min(mu);
            c.require(mu > 0.0, || format!("μ({m}, {q}) = {mu:e}"));
            c.require(ell > 1.0, || format!("ℓ({m}, {q}) = {ell}"));
        }
    }
    c.within_budget(start, Duration::from_secs(2), "sampling");
    c.note(format!("min μ on grid = {min_mu:.3e}"));
    Ok(c)
}

fn critical_constants(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    let start = Instant::now();
    for (q, exact) in [(1.0, 0.5 * PI2), (2.0, 0.75 * PI2)] {
        let r = alpha_critical(q, SEARCH_TOL, opts)?;
        let err = rel(r.alpha_q, exact);
        c.require(err < 1e-2, || format!("α_{q} = {} vs {exact}", r.alpha_q));
        c.require(r.solver_calls <= 25, || {
            format!("q = {q}: {} solver calls", r.solver_calls)
        });
        c.note(format!(
            "α_{q} = {:.6} ({} calls)",
            r.alpha_q, r.solver_calls
        ));
    }
    c.within_budget(start, Duration::from_secs(600), "both searches");
    Ok(c)
}

fn saturation_transition(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    for q in [1.5, 2.0] {
        let alpha_q = alpha_critical(q, SEARCH_TOL, opts)?.alpha_q;

        let above = minimize(&ProblemParams::new(alpha_q + 0.5, q)?, opts)?;
        let p = analyze(&above.minimizer)?;
        let h = above.minimizer.spacing();
        c.require(rel(above.lambda, PI2) < 1e-4, || {
            format!("q = {q}: λ above threshold = {}", above.lambda)
        });
        c.require(above.q_average.abs() < 1e-6, || {
            format!("q = {q}: q-average {:e}", above.q_average)
        });
        c.require(p.odd_defect < 1e-3, || {
            format!("q = {q}: odd defect {:e}", p.odd_defect)
        });
        c.require(p.zeros.len() == 1 && p.zeros[0].abs() <= 2.0 * h, || {
            format!("q = {q}: zeros {:?}", p.zeros)
        });

        let below = minimize(&ProblemParams::new(alpha_q - 0.5, q)?, opts)?;
        c.require(below.sign_class.is_constant_sign(), || {
            format!("q = {q}: minimizer below threshold is {}", below.sign_class)
        });
        c.require(below.lambda < PI2, || {
            format!("q = {q}: λ below threshold = {}", below.lambda)
        });
        c.note(format!(
            "q={q}: α_q = {alpha_q:.4}, λ below = {:.6}",
            below.lambda
        ));
    }
    Ok(c)
}

fn linear_branch(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.0, 1.0, 2.0, 4.0, 7.0] {
        let l = lambda(alpha, 2.0, opts)?;
        let err = rel(l, 0.25 * PI2 + alpha);
        worst = worst.max(err);
        c.require(err < 1e-4, || format!("α = {alpha}: λ = {l}"));
    }
    c.within_budget(start, Duration::from_secs(30), "five solves");
    c.note(format!("worst relative error {worst:.1e}"));
    Ok(c)
}

/// Root of `q1_alpha_of_lambda(λ) = alpha` by bisection on (π²/4, π²).
pub fn q1_lambda_of_alpha(alpha: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.25 * PI2, PI2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q1_alpha_of_lambda(mid)? < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn q1_branch(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    for alpha in [1.0, 2.5, 4.0] {
        let l = lambda(alpha, 1.0, opts)?;
        let oracle = q1_lambda_of_alpha(alpha)?;
        let err = rel(l, oracle);
        c.require(err < 1e-3, || {
            format!("α = {alpha}: λ = {l}, oracle {oracle}")
        });
        c.note(format!("α={alpha}: {err:.1e}"));
    }
    let params = ProblemParams::new(0.5 * PI2, 1.0)?;
    for a in [0.0, 0.25, 0.5, 1.0] {
        let quotient = rayleigh_quotient(&q1_family_y_a(a, opts.n)?, &params)?;
        c.require(rel(quotient, PI2) < 1e-6, || {
            format!("y_A with A = {a}: quotient {quotient}")
        });
    }
    Ok(c)
}

fn lipschitz_structure(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    let alphas = [-2.0, 0.0, 1.0, 3.0, 6.0, 9.0];
    for q in [1.0, 1.5, 2.0] {
        let values = alphas
            .iter()
            .map(|&a| lambda(a, q, opts))
            .collect::<Result<Vec<f64>>>()?;
        let slope = 2f64.powf((2.0 - q) / q);
        for k in 1..alphas.len() {
            let step = values[k] - values[k - 1];
            // equal saturated values may differ in the last bits
            c.require(step >= -1e-12 * values[k].abs(), || {
                format!(
                    "q = {q}: λ decreases from α = {} to {}: {step:e}",
                    alphas[k - 1],
                    alphas[k]
                )
            });
            let bound = slope * (alphas[k] - alphas[k - 1]) + 1e-6;
            c.require(step <= bound, || {
                format!(
                    "q = {q}: increment {step} exceeds {bound} at α = {}",
                    alphas[k]
                )
            });
        }
    }
    c.note("nondecreasing with bounded increments for q ∈ {1, 1.5, 2}".into());
    Ok(c)
}

fn lower_bound(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    for q in [1.25, 1.5, 1.75, 2.0] {
        let r = alpha_critical(q, SEARCH_TOL, opts)?;
        let bound = alpha_lower_bound(q);
        c.require(r.alpha_q >= bound - r.tolerance, || {
            format!("q = {q}: α_q = {} below {bound}", r.alpha_q)
        });
        c.note(format!("q={q}: {:.4} ≥ {bound:.4}", r.alpha_q));
    }
    Ok(c)
}

fn duality(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    for q in [1.0, 1.5, 2.0] {
        match alpha_zero(q, SEARCH_TOL, opts) {
            Ok(z) => {
                c.require(z.alpha_zero < 0.0, || {
                    format!("q = {q}: α₀ = {}", z.alpha_zero)
                });
                c.note(format!(
                    "q={q}: α₀ = {:.6}, dual {:.6}",
                    z.alpha_zero, z.dual_minimum
                ));
            }
            Err(e) => c.require(false, || format!("q = {q}: {e}")),
        }
        let dual = minimize_dual(q, opts)?;
        let class = analyze(&dual.minimizer)?.sign_class;
        c.require(class.is_constant_sign(), || {
            format!("q = {q}: dual minimizer is {class}")
        });
    }
    Ok(c)
}

fn rescaling(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    let (alpha, q) = (1.0, 2.0);
    let scaled = rescale_lambda(-2.0, 2.0, alpha, q, opts)?;
    let wide = ProblemParams::on_interval(alpha, q, Interval::new(-2.0, 2.0)?)?;
    let direct = minimize(&wide, opts)?.lambda;
    let err = rel(scaled, direct);
    c.require(err < 1e-3, || {
        format!("rescaled {scaled} vs direct {direct}")
    });
    c.note(format!("λ = {direct:.8}, relative difference {err:.1e}"));
    Ok(c)
}

/// L² distance after scaling both to unit mass and matching signs.
fn aligned_distance(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    let (u, v) = (u.normalized()?, v.normalized()?);
    let inner: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    u.scaled(inner.signum()).l2_distance(&v)
}

fn shooting_agreement(opts: &SolverOptions) -> Result<Checks> {
    let mut c = Checks::default();
    // 2π² lies above α_q for every q: it is the upper end of the search bracket
    let alpha = 2.0 * PI2;
    for q in [1.25, 1.5, 1.75, 2.0] {
        let solved = minimize(&ProblemParams::new(alpha, q)?, opts)?;
        c.require(solved.sign_class == SignClass::SignChanging, || {
            format!("q = {q}: minimizer is {}", solved.sign_class)
        });
        let shot = reconstruct_profile(1.0, q, opts.n)?;
        let d = aligned_distance(&shot, &solved.minimizer)?;
        c.require(d < 1e-3, || format!("q = {q}: L² distance {d:e}"));
        c.note(format!("q={q}: {d:.1e}"));
    }
    Ok(c)
}

/// Runs one criterion by number; an error inside it counts as a failure.
pub fn run_criterion(id: u32, opts: &SolverOptions) -> CriterionOutcome {
    let start = Instant::now();
    let name = CRITERIA
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown criterion");
    let checks = match id {
        1 => poincare_baseline(opts),
        2 => h_closed_forms(),
        3 => monotonicity(),
        4 => critical_constants(opts),
        5 => saturation_transition(opts),
        6 => linear_branch(opts),
        7 => q1_branch(opts),
        8 => lipschitz_structure(opts),
        9 => lower_bound(opts),
        10 => duality(opts),
        11 => rescaling(opts),
        12 => shooting_agreement(opts),
        _ => Err(crate::error::Error::InvalidParameter(format!(
            "no criterion {id}"
        ))),
    };
    let (passed, detail) = match checks {
        Ok(c) => c.finish(),
        Err(e) => (false, e.to_string()),
    };
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(opts: &SolverOptions) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, opts))
        .collect()
}
