//! Batch evaluation of `λ(α, q)` over a rectangular grid.

use std::io::Write;

use nonlocal_eigen::{analyze, minimize, Error, ProblemParams, SolverOptions};

use crate::output::format_number;
use crate::CliError;

pub const CSV_HEADER: &str =
    "alpha,q,lambda,sign_class,q_average,m_bar,odd_defect,residual,iterations";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    fn validate(&self, name: &str) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::Usage(format!("{name} count must be at least 1")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(CliError::Usage(format!(
                "{name} range must be ordered, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub alpha: Range,
    pub q: Range,
    pub options: SolverOptions,
    pub jobs: usize,
}

pub struct Row {
    pub alpha: f64,
    pub q: f64,
    pub lambda: f64,
    pub sign_class: String,
    pub q_average: f64,
    pub m_bar: f64,
    pub odd_defect: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Row {
    pub fn to_csv(&self) -> String {
        [
            format_number(self.alpha),
            format_number(self.q),
            format_number(self.lambda),
            self.sign_class.clone(),
            format_number(self.q_average),
            format_number(self.m_bar),
            format_number(self.odd_defect),
            format_number(self.residual),
            self.iterations.to_string(),
        ]
        .join(",")
    }
}

fn evaluate(alpha: f64, q: f64, opts: &SolverOptions) -> Result<Row, Error> {
    let params = ProblemParams::new(alpha, q)?;
    let result = match minimize(&params, opts) {
        Ok(r) => r,
        Err(Error::Nonconverged { best }) => *best,
        Err(e) => return Err(e),
    };
    let profile = analyze(&result.minimizer)?;
    Ok(Row {
        alpha,
        q,
        lambda: result.lambda,
        sign_class: result.sign_class.to_string(),
        q_average: result.q_average,
        m_bar: profile.m_bar,
        odd_defect: profile.odd_defect,
        residual: result.residual,
        iterations: result.iterations,
        converged: result.converged,
    })
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        self.alpha.validate("alpha")?;
        self.q.validate("q")?;
        if self.jobs == 0 {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        self.options.validate().map_err(CliError::from)
    }

    /// Grid points with `q` in the outer loop.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let alphas = self.alpha.points();
        self.q
            .points()
            .into_iter()
            .flat_map(|q| alphas.iter().map(move |&a| (a, q)))
            .collect()
    }

    /// Evaluates every grid point; contiguous chunks go to `jobs` threads and
    /// the rows come back in grid order.
    pub fn run(&self) -> Result<Vec<Row>, CliError> {
        self.validate()?;
        let points = self.points();
        let chunk = points.len().div_ceil(self.jobs);
        let opts = &self.options;
        let chunks: Vec<Result<Vec<Row>, Error>> = std::thread::scope(|scope| {
            let handles: Vec<_> = points
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || part.iter().map(|&(a, q)| evaluate(a, q, opts)).collect())
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scan worker panicked"))
                .collect()
        });
        let mut rows = Vec::with_capacity(points.len());
        for c in chunks {
            rows.extend(c?);
        }
        Ok(rows)
    }
}

pub fn write_csv(rows: &[Row], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_points_hit_both_ends() {
        let r = Range {
            min: 0.0,
            max: 10.0,
            count: 21,
        };
        let p = r.points();
        assert_eq!(p.len(), 21);
        assert_eq!((p[0], p[20]), (0.0, 10.0));
        assert!((p[1] - 0.5).abs() < 1e-15);
        assert_eq!(
            Range {
                min: 2.0,
                max: 2.0,
                count: 1
            }
            .points(),
            vec![2.0]
        );
    }

    #[test]
    fn q_is_the_outer_loop() {
        let spec = ScanSpec {
            alpha: Range {
                min: 0.0,
                max: 1.0,
                count: 2,
            },
            q: Range {
                min: 1.0,
                max: 2.0,
                count: 2,
            },
            options: SolverOptions::default(),
            jobs: 1,
        };
        assert_eq!(
            spec.points(),
            vec![(0.0, 1.0), (1.0, 1.0), (0.0, 2.0), (1.0, 2.0)]
        );
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = ScanSpec {
            alpha: Range {
                min: 1.0,
                max: 0.0,
                count: 2,
            },
            q: Range {
                min: 1.0,
                max: 2.0,
                count: 2,
            },
            options: SolverOptions::default(),
            jobs: 1,
        };
        assert!(spec.validate().is_err());
        spec.alpha = Range {
            min: 0.0,
            max: 1.0,
            count: 0,
        };
        assert!(spec.validate().is_err());
        spec.alpha.count = 2;
        spec.jobs = 0;
        assert!(spec.validate().is_err());
    }
}
