//! Argument parsing and the five commands.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ccc4_core::inverse::{self, CyclicShape};
use ccc4_core::solver::{self, CertTolerances, SolveError, SolveRecord, SolverOptions};
use ccc4_core::{json, Error, MassVector};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::scan::{self, ScanSpec};
use crate::{cert, identities};
use crate::{EXIT_ALARM, EXIT_CANT_CREATE, EXIT_FAIL, EXIT_NOT_CONVERGED, EXIT_NO_INPUT, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "ccc4", version, about = "Co-circular four-body central configurations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the potential for given masses and print the certified record.
    Solve(SolveArgs),
    /// Solve on a grid over the mass simplex and write one CSV row per point.
    Scan(ScanArgs),
    /// Recover the masses that make a cyclic shape a central configuration.
    Inverse(InverseArgs),
    /// Re-run every certificate on a stored solve record.
    Certify(CertifyArgs),
    /// Check the algebraic identities on random samples.
    Identities(IdentitiesArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Four positive masses, comma separated.
    #[arg(long, value_name = "M1,M2,M3,M4", allow_hyphen_values = true, value_parser = parse_masses)]
    pub masses: MassVector,
    #[arg(long, default_value_t = SolverOptions::default().starts)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative gradient tolerance of the descent.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Points per free mass (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    /// Mass held fixed before normalization.
    #[arg(long, value_name = "mK=V", default_value = "m4=1", value_parser = parse_fix)]
    pub fix: (usize, f64),
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "CCC4_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Descent starts per grid point.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["angles", "shape"]))]
pub struct InverseArgs {
    /// Four strictly increasing angles, comma separated (radians unless --degrees).
    #[arg(long, value_name = "A1,A2,A3,A4", allow_hyphen_values = true, value_parser = parse_four)]
    pub angles: Option<[f64; 4]>,
    #[arg(long, requires = "angles")]
    pub degrees: bool,
    #[arg(long, default_value_t = 1.0, requires = "angles")]
    pub radius: f64,
    /// JSON file `{"theta": [..4], "radius": R}` (radians).
    #[arg(long)]
    pub shape: Option<PathBuf>,
    /// Tolerance on the Dziobek compatibility residual.
    #[arg(long, default_value_t = inverse::COMPAT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Solve record JSON.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_four(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("not a number: {p:?}"))?;
    }
    Ok(out)
}

fn parse_masses(s: &str) -> Result<MassVector, String> {
    MassVector::new(parse_four(s)?).map_err(|e| e.to_string())
}

fn parse_fix(s: &str) -> Result<(usize, f64), String> {
    let err = || format!("expected mK=V with K in 1..=4 and V > 0, got {s:?}");
    let (name, value) = s.split_once('=').ok_or_else(err)?;
    let idx = match name.trim() {
        "m1" => 0,
        "m2" => 1,
        "m3" => 2,
        "m4" => 3,
        _ => return Err(err()),
    };
    let v: f64 = value.trim().parse().map_err(|_| err())?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(err());
    }
    Ok((idx, v))
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
fn emit(text: &str, out: Option<&Path>) -> Result<(), i32> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_CANT_CREATE
        }),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|_| EXIT_FAIL)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    json::to_string(v).expect("records serialize")
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let code = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Inverse(a) => cmd_inverse(&a),
        Command::Certify(a) => cmd_certify(&a),
        Command::Identities(a) => cmd_identities(&a),
    };
    code.unwrap_or_else(|c| c)
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32, i32> {
    let mut opts = SolverOptions { starts: a.starts.max(1), seed: a.seed, ..SolverOptions::default() };
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            eprintln!("error: --tol must be positive");
            return Err(EXIT_USAGE);
        }
        opts.grad_tol = t;
    }
    let (record, code) = match solver::minimize_u(&a.masses, &opts) {
        Ok(rec) => {
            let code = if rec.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
            (rec, code)
        }
        Err(SolveError::UniquenessAlarm { record, spread }) => {
            eprintln!("uniqueness alarm: converged endpoints {spread:e} apart");
            (*record, EXIT_ALARM)
        }
        Err(SolveError::Core(e)) => {
            eprintln!("error: {e}");
            return Err(EXIT_NOT_CONVERGED);
        }
    };
    if code == EXIT_NOT_CONVERGED {
        eprintln!("solver did not converge in {} iterations", record.iterations);
    }
    emit(&to_json(&record), a.out.as_deref())?;
    Ok(code)
}

pub fn cmd_scan(a: &ScanArgs) -> Result<i32, i32> {
    let spec = ScanSpec {
        grid: a.grid as usize,
        fixed: a.fix.0,
        fixed_value: a.fix.1,
        solver: SolverOptions { starts: a.starts.max(1), seed: a.seed, ..SolverOptions::default() },
    };
    let rows = scan::run_scan(&spec, a.jobs).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_FAIL
    })?;
    let mut buf = Vec::new();
    scan::write_csv(&rows, &mut buf).expect("writing to memory");
    emit(std::str::from_utf8(&buf).expect("CSV is ASCII"), a.out.as_deref())?;
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("{failed} of {} grid points did not converge", rows.len());
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

fn read_shape(path: &Path) -> Result<CyclicShape, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_NO_INPUT
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: invalid shape in {}: {e}", path.display());
        EXIT_USAGE
    })
}

pub fn cmd_inverse(a: &InverseArgs) -> Result<i32, i32> {
    let shape = match (&a.shape, a.angles) {
        (Some(path), _) => read_shape(path)?,
        (None, Some(angles)) => {
            let s = if a.degrees {
                CyclicShape::from_degrees(angles, a.radius)
            } else {
                CyclicShape::new(angles, a.radius)
            };
            s.map_err(|e| {
                eprintln!("error: {e}");
                EXIT_USAGE
            })?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let r = inverse::shape_to_distances(&shape);
    match inverse::masses_from_shape(&r, a.tol) {
        Ok(rec) => {
            emit(&to_json(&rec), None)?;
            Ok(EXIT_OK)
        }
        Err(e @ Error::Infeasible(_)) => {
            println!("{e}");
            Ok(EXIT_FAIL)
        }
        Err(e) => {
            println!("infeasible: {e}");
            Ok(EXIT_FAIL)
        }
    }
}

#[derive(Serialize)]
struct CertOutput<'a> {
    passed: bool,
    checks: &'a [solver::Check],
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<i32, i32> {
    let text = fs::read_to_string(&a.input).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", a.input.display());
        EXIT_NO_INPUT
    })?;
    let rec: SolveRecord = serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: {} is not a solve record: {e}", a.input.display());
        EXIT_NO_INPUT
    })?;
    let report = cert::certify_record(&rec, &CertTolerances::default());
    let passed = report.passed();
    emit(&to_json(&CertOutput { passed, checks: &report.checks }), None)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

pub fn cmd_identities(a: &IdentitiesArgs) -> Result<i32, i32> {
    let results = identities::run_battery(a.samples as usize, a.seed);
    emit(&identities::format_table(&results), None)?;
    Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAIL })
}
