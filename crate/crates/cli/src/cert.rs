//! Certification of a stored solve record.
//!
//! Adds the Cartesian end-to-end checks to the distance-space certificate:
//! a co-circular record must embed on a circle as a genuine central
//! configuration, and a non-co-circular one must stay visibly far from any
//! planar central configuration.

use ccc4_core::geometry;
use ccc4_core::oracle::{self, LambdaFit};
use ccc4_core::solver::{self, CertReport, CertTolerances, Check, SolveRecord, SolverOptions};

/// Largest Cartesian residual accepted for a co-circular record.
pub const CARTESIAN_TOL: f64 = 1e-7;
/// Smallest Cartesian residual expected of a non-co-circular record.
pub const CONVERSE_FLOOR: f64 = 1e-3;

fn check(name: &str, value: f64, threshold: f64, passed: bool) -> Check {
    Check { name: name.to_string(), value, threshold, passed }
}

/// Cartesian residual of the record's distances after planar embedding:
/// on the circle when co-circular, by classical scaling otherwise.
pub fn cartesian_check(rec: &SolveRecord) -> Check {
    if rec.is_cocircular {
        match oracle::embed_cyclic(&rec.r_star, &rec.masses) {
            Ok(cfg) => {
                let (res, _) = oracle::cartesian_cc_residual(&cfg, LambdaFit::Fit);
                check("cartesian_cc", res, CARTESIAN_TOL, res <= CARTESIAN_TOL)
            }
            Err(_) => check("cartesian_cc", f64::INFINITY, CARTESIAN_TOL, false),
        }
    } else {
        let cfg = oracle::mds_planar_embedding(&rec.r_star, &rec.masses);
        let (res, _) = oracle::cartesian_cc_residual(&cfg, LambdaFit::Fit);
        check("cartesian_converse", res, CONVERSE_FLOOR, res > CONVERSE_FLOOR)
    }
}

/// Full certificate: [`solver::certify_minimum`], a recomputation of the
/// co-circular flag from `r*`, and [`cartesian_check`].
pub fn certify_record(rec: &SolveRecord, tol: &CertTolerances) -> CertReport {
    let mut report = solver::certify_minimum(rec, tol);
    let k = geometry::k_term(&rec.r_star).abs();
    let k_tol = SolverOptions::default().cocircular_tol * rec.r_star.max().powi(3);
    report.checks.push(check("cocircular_flag", k, k_tol, (k <= k_tol) == rec.is_cocircular));
    report.checks.push(cartesian_check(rec));
    report
}
