use thiserror::Error;

use crate::solver::EigenResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Carries the best estimate reached before giving up.
    #[error(
        "quadrature nonconvergence: best estimate {best} with error estimate {error_estimate}"
    )]
    QuadratureNonconvergence { best: f64, error_estimate: f64 },

    #[error("integrand domain violation: radicand {radicand} at y = {y}")]
    IntegrandDomain { y: f64, radicand: f64 },

    #[error("divergent: {0}")]
    Divergent(&'static str),

    /// The solver hit its iteration cap; the best iterate is attached.
    #[error("nonconverged after {} iterations (best quotient {})", .best.iterations, .best.lambda)]
    Nonconverged { best: Box<EigenResult> },

    #[error("bracket violation: predicate is {at_lower} at alpha = {lower} and {at_upper} at alpha = {upper}")]
    BracketViolation {
        lower: f64,
        upper: f64,
        at_lower: bool,
        at_upper: bool,
    },

    #[error("duality mismatch: alpha_zero = {alpha_zero}, dual minimum = {dual_minimum}")]
    DualityMismatch { alpha_zero: f64, dual_minimum: f64 },
}
