//! Sweep of the normalized mass simplex.
//!
//! One mass is held at a fixed value and the other three run over the grid
//! `k / h` for `k = 1..=N`, `h = ⌈N/2⌉`, so the grid always contains the
//! fixed value itself and hence the equal-mass point. Each point is
//! rescaled to total mass 4 before solving. Rows come out in lexicographic
//! grid order whatever the number of worker threads.

use std::fmt::Write as _;
use std::io::{self, Write};

use ccc4_core::json::format_f64;
use ccc4_core::solver::{self, SolveError, SolverOptions};
use ccc4_core::MassVector;
use rayon::prelude::*;

/// First line of every scan CSV.
pub const SCHEMA_LINE: &str = "# ccc4-schema=1";
/// Column header, second line of every scan CSV.
pub const HEADER: &str = "m1,m2,m3,m4,K_star,U_star,lambda,is_cocircular,iterations,converged";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub grid: usize,
    /// Index (0-based) of the mass held fixed.
    pub fixed: usize,
    pub fixed_value: f64,
    pub solver: SolverOptions,
}

impl ScanSpec {
    pub fn new(grid: usize) -> Self {
        ScanSpec { grid, fixed: 3, fixed_value: 1.0, solver: SolverOptions { starts: 1, ..SolverOptions::default() } }
    }
}

/// Grid values `k / ⌈N/2⌉`, `k = 1..=N`.
pub fn grid_values(n: usize) -> Vec<f64> {
    let h = n.div_ceil(2) as f64;
    (1..=n).map(|k| k as f64 / h).collect()
}

/// Grid points in lexicographic order of their free-mass indices.
pub fn grid_points(spec: &ScanSpec) -> Vec<MassVector> {
    let vals = grid_values(spec.grid);
    let n = vals.len();
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut free = [vals[a], vals[b], vals[c]].into_iter();
                let m: [f64; 4] =
                    std::array::from_fn(|i| if i == spec.fixed { spec.fixed_value } else { free.next().unwrap() });
                out.push(MassVector::new(m).expect("grid masses are positive").with_total(4.0));
            }
        }
    }
    out
}

/// One line of the scan; `None` fields are written as empty CSV cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub masses: MassVector,
    pub k_star: Option<f64>,
    pub u_star: Option<f64>,
    pub lambda: Option<f64>,
    pub is_cocircular: Option<bool>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn scan_row(m: &MassVector, opts: &SolverOptions) -> ScanRow {
    let rec = match solver::minimize_u(m, opts) {
        Ok(rec) => Some(rec),
        Err(SolveError::UniquenessAlarm { .. }) | Err(SolveError::Core(_)) => None,
    };
    match rec {
        Some(rec) if rec.converged => ScanRow {
            masses: *m,
            k_star: Some(rec.k_value),
            u_star: Some(rec.scalars.u),
            lambda: Some(rec.multipliers.lambda),
            is_cocircular: Some(rec.is_cocircular),
            iterations: rec.iterations,
            converged: true,
        },
        other => ScanRow {
            masses: *m,
            k_star: None,
            u_star: None,
            lambda: None,
            is_cocircular: None,
            iterations: other.map_or(0, |r| r.iterations),
            converged: false,
        },
    }
}

/// Solves every grid point on a pool of `jobs` threads (0 = rayon default).
pub fn run_scan(spec: &ScanSpec, jobs: usize) -> Result<Vec<ScanRow>, rayon::ThreadPoolBuildError> {
    let points = grid_points(spec);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(|| points.par_iter().map(|m| scan_row(m, &spec.solver)).collect()))
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn csv_line(row: &ScanRow) -> String {
    let mut s = String::new();
    for m in row.masses.as_array() {
        write!(s, "{},", format_f64(*m)).unwrap();
    }
    write!(
        s,
        "{},{},{},{},{},{}",
        opt_f64(row.k_star),
        opt_f64(row.u_star),
        opt_f64(row.lambda),
        row.is_cocircular.map(|b| b.to_string()).unwrap_or_default(),
        row.iterations,
        row.converged
    )
    .unwrap();
    s
}

pub fn write_csv<W: Write>(rows: &[ScanRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "{HEADER}")?;
    for row in rows {
        writeln!(w, "{}", csv_line(row))?;
    }
    w.flush()
}
