//! Command-line front end for the cylinder-measure toolkit.
//!
//! Each subcommand runs one check and prints a JSON report on standard
//! output (an array of reports for `run`), with a short human summary on
//! standard error. Exit status: 0 when all checks pass, 1 when a check
//! reports a failing verdict, 2 on malformed input of any kind.

mod ops;
mod problem;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Args, Parser, Subcommand};
use cylmp::gaussian::CovarianceSpec;
use cylmp::moments::MomentTable;
use cylmp::rat::parse_rational;
use serde_json::{json, Value};

use ops::Backend;
use report::{exit_code, Body, CliError, Report, EXIT_MALFORMED};

#[derive(Parser)]
#[command(
    name = "cylmp",
    version,
    about = "Moment and measure checks for cylinder measures on R[x1, x2, ...]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Backend selection for checks that only need the moment functional.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct BackendArgs {
    /// Covariance spec JSON file (Gaussian backend).
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Moment table JSON file (table backend).
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PolyArgs {
    /// Polynomial text, e.g. "x1^4 - 3".
    #[arg(long, value_name = "STR")]
    poly: Option<String>,
    /// Read the polynomial text from a file.
    #[arg(long, value_name = "FILE")]
    poly_file: Option<PathBuf>,
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the moment functional on a polynomial.
    Eval {
        #[command(flatten)]
        backend: BackendArgs,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compare the two Wick evaluation routes on one Gaussian monomial.
    Wick {
        /// Covariance spec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Moment-growth divergence diagnostics for one variable.
    Carleman {
        #[command(flatten)]
        backend: BackendArgs,
        /// 1-based variable index.
        #[arg(long, value_name = "K")]
        var: u32,
        /// Number of series terms to compute.
        #[arg(long, value_name = "N")]
        horizon: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sigma-additivity verdict from the covariance tail.
    Classify {
        /// Covariance spec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compare marginal moments between nested index sets.
    Consistency {
        /// Covariance spec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Inner index set, comma separated.
        #[arg(long, value_delimiter = ',', value_name = "1,2", required = true)]
        indices: Vec<u32>,
        /// Outer index set, comma separated; must contain --indices.
        #[arg(long, value_delimiter = ',', value_name = "1,2,3", required = true)]
        superset: Vec<u32>,
        /// Highest total degree compared.
        #[arg(long, value_name = "D", default_value_t = 6)]
        degree: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Box-partition additivity for one marginal.
    Axioms {
        /// Covariance spec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Marginal index set, comma separated.
        #[arg(long, value_delimiter = ',', value_name = "1,2", required = true)]
        indices: Vec<u32>,
        /// JSON file with {"cells": [box, ...], "whole": box}; "whole"
        /// defaults to the full space.
        #[arg(long, value_name = "FILE")]
        boxes: PathBuf,
        /// Seed for Monte Carlo box probabilities.
        #[arg(long, value_name = "S")]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Moment matrix with an exact positive semidefiniteness certificate.
    Hankel {
        #[command(flatten)]
        backend: BackendArgs,
        /// Index set of the matrix variables, comma separated.
        #[arg(long, value_delimiter = ',', value_name = "1,2", required = true)]
        indices: Vec<u32>,
        /// Basis truncation degree.
        #[arg(long, value_name = "D")]
        degree: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Recover an atomic measure on one variable from its moments.
    Quad {
        #[command(flatten)]
        backend: BackendArgs,
        /// 1-based variable index.
        #[arg(long, value_name = "K")]
        var: u32,
        /// Number of atoms; consumes the moments of degree < 2D.
        #[arg(long, value_name = "D")]
        degree: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Characteristic function of the Gaussian measure at a linear form.
    Fourier {
        /// Covariance spec JSON file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact Chebyshev tail bound L(t^2)/a^2 for a degree-1 polynomial.
    Chebyshev {
        #[command(flatten)]
        backend: BackendArgs,
        #[command(flatten)]
        poly: PolyArgs,
        /// Tail threshold a > 0, as an integer or "p/q".
        #[arg(long, value_name = "A")]
        threshold: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Canonical form and boundedness certificate for a fraction.
    Frac {
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run every check in a problem file.
    Run {
        /// Problem file (JSON).
        #[arg(value_name = "FILE")]
        file: PathBuf,
        /// Worker threads for independent checks.
        #[arg(long, value_name = "J", default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load_spec(path: &Path) -> Result<CovarianceSpec, CliError> {
    Ok(CovarianceSpec::from_json(&load_json(path)?)?)
}

fn load_backend(args: &BackendArgs) -> Result<Backend, CliError> {
    match (&args.spec, &args.table) {
        (Some(path), None) => Ok(Backend::Gaussian(load_spec(path)?)),
        (None, Some(path)) => Ok(Backend::Table(MomentTable::from_json(&load_json(path)?)?)),
        _ => unreachable!("clap enforces exactly one backend flag"),
    }
}

fn poly_text(args: &PolyArgs) -> Result<String, CliError> {
    match (&args.poly, &args.poly_file) {
        (Some(text), None) => Ok(text.clone()),
        (None, Some(path)) => Ok(read_file(path)?.trim().to_string()),
        _ => unreachable!("clap enforces exactly one polynomial flag"),
    }
}

/// Runs the subcommand; returns the reports, whether they form a batch,
/// and the output redirection.
fn execute(command: Command) -> (Result<Vec<Report>, CliError>, bool, Option<PathBuf>) {
    match command {
        Command::Eval { backend, poly, out } => {
            let body = || ops::eval_check(&load_backend(&backend)?, &poly_text(&poly)?);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Wick { spec, poly, out } => {
            let body = || ops::wick_check(&load_spec(&spec)?, &poly_text(&poly)?);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Carleman {
            backend,
            var,
            horizon,
            out,
        } => {
            let body = || ops::carleman_check(&load_backend(&backend)?, var, horizon);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Classify { spec, out } => {
            let body = || ops::classify_check(&load_spec(&spec)?);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Consistency {
            spec,
            indices,
            superset,
            degree,
            out,
        } => {
            let body =
                || ops::consistency_check(&load_spec(&spec)?, &indices, &superset, degree);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Axioms {
            spec,
            indices,
            boxes,
            seed,
            out,
        } => {
            let body =
                || ops::axioms_check(&load_spec(&spec)?, &indices, &load_json(&boxes)?, seed);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Hankel {
            backend,
            indices,
            degree,
            out,
        } => {
            let body = || ops::hankel_check(&load_backend(&backend)?, &indices, degree);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Quad {
            backend,
            var,
            degree,
            out,
        } => {
            let body = || ops::quad_check(&load_backend(&backend)?, var, degree);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Fourier { spec, poly, out } => {
            let body = || ops::fourier_check(&load_spec(&spec)?, &poly_text(&poly)?);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Chebyshev {
            backend,
            poly,
            threshold,
            out,
        } => {
            let body = || {
                ops::chebyshev_check(
                    &load_backend(&backend)?,
                    &poly_text(&poly)?,
                    &parse_rational(&threshold)?,
                )
            };
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Frac { poly, out } => {
            let body = || ops::frac_check(&poly_text(&poly)?);
            (body().map(|r| vec![r]), false, out.out)
        }
        Command::Run { file, jobs, out } => {
            let body = || {
                let text = read_file(&file)?;
                let (ctx, checks) = problem::load_problem(&text, &file.display().to_string())?;
                Ok(problem::run_all(&ctx, &checks, jobs))
            };
            (body(), true, out.out)
        }
    }
}

fn emit(payload: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(payload).expect("report values serialize without errors");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize(reports: &[Report]) {
    for report in reports {
        let status = match &report.body {
            Body::Done { pass: true, .. } => "pass".to_string(),
            Body::Done { .. } => "FAIL".to_string(),
            Body::Error(e) => format!("error ({})", e.code()),
        };
        eprintln!("{}: {status}", report.check);
    }
    let passed = reports.iter().filter(|r| r.pass()).count();
    eprintln!("{passed} of {} checks passed", reports.len());
}

fn run(command: Command) -> i32 {
    let (outcome, batch, out) = execute(command);
    match outcome {
        Ok(reports) => {
            let payload = if batch {
                Value::Array(reports.iter().map(Report::to_json).collect())
            } else {
                reports[0].to_json()
            };
            if let Err(e) = emit(&payload, out.as_deref()) {
                eprintln!("error: {}", e.message());
                return EXIT_MALFORMED;
            }
            summarize(&reports);
            exit_code(&reports)
        }
        Err(e) => {
            let payload = json!({"error": e.to_json()});
            let _ = emit(&payload, out.as_deref());
            eprintln!("error: {}", e.message());
            EXIT_MALFORMED
        }
    }
}

fn main() {
    let cli = Cli::parse();
    exit(run(cli.command));
}
