//! End-to-end behaviour of the minimizer and its certificates.

use ccc4_core::geometry::{self, DistanceVector, MassVector};
use ccc4_core::json;
use ccc4_core::oracle::{self, LambdaFit};
use ccc4_core::solver::{self, CertTolerances, SolveRecord, SolverOptions};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn solve(m: [f64; 4], opts: &SolverOptions) -> SolveRecord {
    solver::minimize_u(&MassVector::new(m).unwrap(), opts).unwrap()
}

#[test]
fn equal_masses_give_the_square() {
    let rec = solve([1.0; 4], &SolverOptions::default());
    let sq = [1.0, SQRT2, 1.0, 1.0, SQRT2, 1.0];
    for k in 0..6 {
        assert!((rec.r_star.as_array()[k] - sq[k]).abs() <= 1e-8);
    }
    let lambda = (1.0 + 2f64.powf(-1.5)) / 2.0;
    assert!((rec.multipliers.lambda - lambda).abs() <= 1e-9);
    assert!((rec.multipliers.sigma - (1.0 - lambda)).abs() <= 1e-9);
    assert!(rec.minors.iter().all(|&d| d > 0.0));
    assert!(rec.k_value.abs() <= 1e-10);
    assert!(rec.converged && rec.is_cocircular);
}

#[test]
fn reruns_are_identical() {
    let opts = SolverOptions { starts: 50, seed: 7, ..SolverOptions::default() };
    let a = solve([2.0, 2.0, 1.0, 1.0], &opts);
    let b = solve([2.0, 2.0, 1.0, 1.0], &opts);
    assert_eq!(json::to_string(&a).unwrap(), json::to_string(&b).unwrap());
}

#[test]
fn record_survives_json() {
    let rec = solve([3.0, 1.0, 2.0, 1.0], &SolverOptions::default());
    let text = json::to_string(&rec).unwrap();
    let back: SolveRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rec);
    for key in ["\"r_star\"", "\"multipliers\"", "\"minors\"", "\"a_terms\"", "\"is_cocircular\"", "\"U\"", "\"K\""] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn trapezoid_masses_embed_as_central_configuration() {
    let rec = solve([2.0, 2.0, 1.0, 1.0], &SolverOptions::default());
    assert!(rec.is_cocircular);
    let r = rec.r_star.as_array();
    assert!((r[2] - r[3]).abs() <= 1e-9 && (r[1] - r[4]).abs() <= 1e-9);
    let cfg = oracle::embed_cyclic(&rec.r_star, &rec.masses).unwrap();
    let (res, lambda) = oracle::cartesian_cc_residual(&cfg, LambdaFit::Fit);
    assert!(res <= 1e-7, "{res:e}");
    assert!(lambda < 0.0);
}

#[test]
fn non_cocircular_minimum_is_far_from_any_planar_cc() {
    let rec = solve([10.0, 1.0, 1.0, 1.0], &SolverOptions::default());
    assert!(!rec.is_cocircular);
    let cfg = oracle::mds_planar_embedding(&rec.r_star, &rec.masses);
    let (res, _) = oracle::cartesian_cc_residual(&cfg, LambdaFit::Fit);
    assert!(res > 1e-3, "{res:e}");
}

#[test]
fn hundred_starts_find_one_cluster() {
    let opts = SolverOptions::default();
    let sq = DistanceVector::new([1.0, SQRT2, 1.0, 1.0, SQRT2, 1.0]).unwrap();
    let rep = oracle::multistart_uniqueness(&MassVector::equal(), 100, 11, &opts).unwrap();
    assert_eq!(rep.cluster_count, 1);
    assert!(rep.clusters[0].representative.distance_to(&sq) <= 1e-8);
    let rep = oracle::multistart_uniqueness(&MassVector::new([3.0, 1.0, 2.0, 1.0]).unwrap(), 100, 11, &opts).unwrap();
    assert_eq!(rep.cluster_count, 1);
    assert!(!rep.is_alarm());
}

#[test]
fn certificates_hold_across_mass_space() {
    for m in [[1.0, 1.0, 1.0, 1.0], [3.0, 1.0, 2.0, 1.0], [0.2, 5.0, 0.3, 4.0], [5.0, 5.0, 0.2, 0.2]] {
        let rec = solve(m, &SolverOptions::default());
        let rep = solver::certify_minimum(&rec, &CertTolerances::default());
        assert!(rep.passed(), "{m:?}: {rep:?}");
        assert!((geometry::moment_i(&rec.r_star, &rec.masses) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn tampered_multiplier_fails_stationarity() {
    let mut rec = solve([1.0; 4], &SolverOptions::default());
    rec.multipliers.lambda *= 1.01;
    let rep = solver::certify_minimum(&rec, &CertTolerances::default());
    assert!(!rep.check("stationarity").unwrap().passed);
    assert!(!rep.passed());
}

