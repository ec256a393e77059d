//! `nleig`: evaluate, scan and verify the nonlocal eigenvalue `λ(α, q)`.

mod output;
mod scan;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonlocal_eigen::hfun::{self, DEFAULT_TARGET_REL_ERR};
use nonlocal_eigen::solver::DEFAULT_N;
use nonlocal_eigen::verify::{run_criterion, CRITERIA};
use nonlocal_eigen::{alpha_critical, analyze, minimize, Error, ProblemParams, SolverOptions};
use serde::Serialize;

use crate::output::{format_number, to_json};
use crate::scan::{write_csv, Range, ScanSpec};

const SEED_VAR: &str = "NE_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Numerical(Error),
    #[error("{0}")]
    Nonconverged(String),
    #[error("verification failed: {0} of {1} criteria")]
    Verify(usize, usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::DegenerateInput(_) | Error::NonFinite(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) | CliError::Nonconverged(_) => 2,
            CliError::Verify(..) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "nleig",
    version,
    about = "Nonlocal eigenvalue λ(α, q) on (-1, 1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Interior grid nodes
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the quotient for one (α, q) and print the result as JSON
    Lambda {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evaluate the half-period function H(m, q)
    Hfun {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_TARGET_REL_ERR)]
        tol: f64,
    },
    /// Locate the critical coupling α_q by bisection
    AlphaCrit {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Write the minimizer as `x,u` CSV and print its shape as JSON
    Profile {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        q: f64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evaluate a rectangular (α, q) grid and write one CSV row per point
    Scan {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 21)]
        alpha_count: usize,
        #[arg(long, default_value_t = 1.0)]
        q_min: f64,
        #[arg(long, default_value_t = 2.0)]
        q_max: f64,
        #[arg(long, default_value_t = 3)]
        q_count: usize,
        /// Output CSV path; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the available parallelism
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the acceptance criteria and print a pass/fail table
    Verify {
        /// Run only these criteria (repeatable)
        #[arg(long = "criterion", value_parser = clap::value_parser!(u32).range(1..=12))]
        criteria: Vec<u32>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn solver_options(grid: GridArgs) -> Result<SolverOptions, CliError> {
    let mut opts = SolverOptions::default().with_n(grid.n);
    if let Ok(raw) = std::env::var(SEED_VAR) {
        opts.random_seed = raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{SEED_VAR} must be an unsigned integer, got {raw:?}"
            ))
        })?;
    }
    opts.validate()?;
    Ok(opts)
}

#[derive(Serialize)]
struct LambdaRecord {
    alpha: f64,
    q: f64,
    n: usize,
    lambda: f64,
    sign_class: String,
    q_average: f64,
    gamma: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    degenerate: bool,
}

fn cmd_lambda(alpha: f64, q: f64, grid: GridArgs) -> Result<(), CliError> {
    let opts = solver_options(grid)?;
    let params = ProblemParams::new(alpha, q)?;
    let (result, failure) = match minimize(&params, &opts) {
        Ok(r) => (r, None),
        Err(Error::Nonconverged { best }) => {
            let msg = format!("nonconverged after {} iterations", best.iterations);
            (*best, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    let record = LambdaRecord {
        alpha,
        q,
        n: opts.n,
        lambda: result.lambda,
        sign_class: result.sign_class.to_string(),
        q_average: result.q_average,
        gamma: result.gamma,
        residual: result.residual,
        iterations: result.iterations,
        converged: result.converged,
        degenerate: result.degenerate,
    };
    println!("{}", to_json(&record)?);
    match failure {
        Some(msg) => Err(CliError::Nonconverged(msg)),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct HRecord {
    m: f64,
    q: f64,
    h: f64,
    error_estimate: f64,
    /// `H²`, the eigenvalue of the sign-changing solution with this depth.
    lambda: f64,
}

fn cmd_hfun(m: f64, q: f64, tol: f64) -> Result<(), CliError> {
    let e = hfun::H(m, q, tol)?;
    let record = HRecord {
        m,
        q,
        h: e.value,
        error_estimate: e.error_estimate,
        lambda: e.value * e.value,
    };
    println!("{}", to_json(&record)?);
    Ok(())
}

fn cmd_alpha_crit(q: f64, tol: f64, grid: GridArgs) -> Result<(), CliError> {
    let opts = solver_options(grid)?;
    let r = alpha_critical(q, tol, &opts)?;
    println!("{}", to_json(&r)?);
    Ok(())
}

#[derive(Serialize)]
struct ProfileRecord {
    alpha: f64,
    q: f64,
    lambda: f64,
    out: PathBuf,
    #[serde(flatten)]
    shape: nonlocal_eigen::MinimizerProfile,
}

fn cmd_profile(alpha: f64, q: f64, out: PathBuf, grid: GridArgs) -> Result<(), CliError> {
    let opts = solver_options(grid)?;
    let result = minimize(&ProblemParams::new(alpha, q)?, &opts)?;
    let shape = analyze(&result.minimizer)?;
    let mut w = BufWriter::new(File::create(&out)?);
    writeln!(w, "x,u")?;
    for (x, u) in result.minimizer.nodes().zip(result.minimizer.values()) {
        writeln!(w, "{},{}", format_number(x), format_number(*u))?;
    }
    w.flush()?;
    let record = ProfileRecord {
        alpha,
        q,
        lambda: result.lambda,
        out,
        shape,
    };
    println!("{}", to_json(&record)?);
    Ok(())
}

fn cmd_scan(spec: ScanSpec, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = spec.run()?;
    match out {
        Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    let stalled = rows.iter().filter(|r| !r.converged).count();
    if stalled > 0 {
        return Err(CliError::Nonconverged(format!(
            "{stalled} grid points did not converge"
        )));
    }
    Ok(())
}

fn cmd_verify(criteria: Vec<u32>, grid: GridArgs) -> Result<(), CliError> {
    let opts = solver_options(grid)?;
    let ids: Vec<u32> = if criteria.is_empty() {
        CRITERIA.iter().map(|&(id, _)| id).collect()
    } else {
        criteria
    };
    let mut failed = 0;
    for &id in &ids {
        let outcome = run_criterion(id, &opts);
        if !outcome.passed {
            failed += 1;
        }
        println!("{outcome}");
    }
    println!("{} of {} criteria passed", ids.len() - failed, ids.len());
    if failed > 0 {
        return Err(CliError::Verify(failed, ids.len()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Lambda { alpha, q, grid } => cmd_lambda(alpha, q, grid),
        Command::Hfun { m, q, tol } => cmd_hfun(m, q, tol),
        Command::AlphaCrit { q, tol, grid } => cmd_alpha_crit(q, tol, grid),
        Command::Profile {
            alpha,
            q,
            out,
            grid,
        } => cmd_profile(alpha, q, out, grid),
        Command::Scan {
            alpha_min,
            alpha_max,
            alpha_count,
            q_min,
            q_max,
            q_count,
            out,
            jobs,
            grid,
        } => {
            let jobs =
                jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let spec = ScanSpec {
                alpha: Range {
                    min: alpha_min,
                    max: alpha_max,
                    count: alpha_count,
                },
                q: Range {
                    min: q_min,
                    max: q_max,
                    count: q_count,
                },
                options: solver_options(grid)?,
                jobs,
            };
            cmd_scan(spec, out)
        }
        Command::Verify { criteria, grid } => cmd_verify(criteria, grid),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
