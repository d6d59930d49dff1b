//! Randomized battery of the algebraic identities behind the solver.
//!
//! Each identity draws from its own ChaCha8 stream of the given seed, so
//! adding samples to one identity never changes the draws of another.

use std::fmt::Write as _;

use ccc4_core::geometry::{self, DistanceVector, MassVector};
use ccc4_core::oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest angular gap between neighbouring bodies in random cyclic shapes.
pub const MIN_GAP: f64 = 0.05;

pub const PECH_TOL: f64 = 1e-9;
pub const REFERENCE_TOL: f64 = 1e-12;
pub const CYCLIC_K_TOL: f64 = 1e-10;
pub const CYCLIC_H_TOL: f64 = 1e-9;
pub const PARALLEL_TOL: f64 = 1e-6;
pub const CIRCUMRADIUS_TOL: f64 = 1e-9;
pub const HOMOGENEITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn result(name: &'static str, samples: usize, max_residual: f64, threshold: f64) -> IdentityResult {
    IdentityResult { name, samples, max_residual, threshold, passed: max_residual <= threshold }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Positive distances drawn uniformly from `[0.1, 3]`.
pub fn random_distances<R: Rng>(rng: &mut R) -> DistanceVector {
    DistanceVector::new(std::array::from_fn(|_| rng.random_range(0.1..3.0))).unwrap()
}

/// Chord vector of a random cyclic shape (gaps at least [`MIN_GAP`]).
pub fn random_cyclic<R: Rng>(rng: &mut R, radius: f64) -> DistanceVector {
    let theta = oracle::random_cyclic_angles(rng, MIN_GAP);
    DistanceVector::new(oracle::chord_distances(theta, radius)).unwrap()
}

fn max_over<F: FnMut() -> f64>(n: usize, mut f: F) -> f64 {
    (0..n).map(|_| f()).fold(0.0, f64::max)
}

/// `max |½H − (PQ − K²)| / (1 + max r)⁸` over random distance vectors.
pub fn pech(n: usize, seed: u64) -> IdentityResult {
    let mut rng = stream(seed, 0);
    let worst = max_over(n, || {
        let r = random_distances(&mut rng);
        let lhs = 0.5 * geometry::cayley_menger_h(&r);
        let rhs = geometry::ptolemy_p(&r) * geometry::q_term(&r) - geometry::k_term(&r).powi(2);
        (lhs - rhs).abs() / (1.0 + r.max()).powi(8)
    });
    result("pech", n, worst, PECH_TOL)
}

/// `Q = 8` on the unit square and `Q = 2` with all distances 1.
pub fn reference_values() -> IdentityResult {
    let s = std::f64::consts::SQRT_2;
    let square = DistanceVector::new([1.0, s, 1.0, 1.0, s, 1.0]).unwrap();
    let ones = DistanceVector::new([1.0; 6]).unwrap();
    let worst = (geometry::q_term(&square) - 8.0).abs().max((geometry::q_term(&ones) - 2.0).abs());
    result("q_reference", 2, worst, REFERENCE_TOL)
}

/// `K = 0` and `H = 0` on chord vectors of points on a unit circle.
pub fn cyclic_vanishing(n: usize, seed: u64) -> [IdentityResult; 2] {
    let mut rng = stream(seed, 1);
    let (mut k, mut h) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let r = random_cyclic(&mut rng, 1.0);
        k = k.max(geometry::k_term(&r).abs());
        h = h.max(geometry::cayley_menger_h(&r).abs());
    }
    [result("cyclic_k", n, k, CYCLIC_K_TOL), result("cyclic_h", n, h, CYCLIC_H_TOL)]
}

/// Largest componentwise relative deviation of a finite-difference `∇H`
/// from `2Q ∇P` at one cyclic point.
///
/// Plain central differences at step 1e-5 leave a truncation error of a few
/// 1e-6 near shapes with short chords, so the extrapolated form is used.
pub fn parallel_deviation(r: &DistanceVector) -> f64 {
    let fd = oracle::fd_gradient_extrapolated(geometry::cayley_menger_raw, r.as_array(), None);
    let two_q = 2.0 * geometry::q_term(r);
    let gp = geometry::grad_p(r);
    (0..6).map(|k| (fd[k] - two_q * gp[k]).abs() / (two_q * gp[k]).abs()).fold(0.0, f64::max)
}

pub fn gradient_parallel(n: usize, seed: u64) -> IdentityResult {
    let mut rng = stream(seed, 2);
    let worst = max_over(n, || parallel_deviation(&random_cyclic(&mut rng, 1.0)));
    result("gradient_parallel", n, worst, PARALLEL_TOL)
}

/// `|2Q − (4/r_c²) ∏ r_ij| / |2Q|` at one cyclic point; infinite if the
/// circumradius cannot be computed.
pub fn circumradius_deviation(r: &DistanceVector) -> f64 {
    let Ok(rc) = oracle::circumradius(r) else {
        return f64::INFINITY;
    };
    let two_q = 2.0 * geometry::q_term(r);
    let prod: f64 = r.as_array().iter().product();
    (two_q - 4.0 / (rc * rc) * prod).abs() / two_q.abs()
}

pub fn circumradius(n: usize, seed: u64) -> IdentityResult {
    let mut rng = stream(seed, 3);
    let worst = max_over(n, || {
        let radius = rng.random_range(0.5..2.0);
        circumradius_deviation(&random_cyclic(&mut rng, radius))
    });
    result("circumradius", n, worst, CIRCUMRADIUS_TOL)
}

type Scalar = fn(&DistanceVector, &MassVector) -> f64;

/// Name, degree, and evaluator of each homogeneous function of `r`.
///
/// H is a 5×5 determinant with four rows of squared distances and a border
/// of ones, so it has degree 6 (as `½H = PQ − K²` confirms).
pub const HOMOGENEOUS: [(&str, i32, Scalar); 6] = [
    ("homogeneity_U", -1, |r, m| geometry::potential_u(r, m)),
    ("homogeneity_I", 2, |r, m| geometry::moment_i(r, m)),
    ("homogeneity_P", 2, |r, _| geometry::ptolemy_p(r)),
    ("homogeneity_K", 3, |r, _| geometry::k_term(r)),
    ("homogeneity_Q", 4, |r, _| geometry::q_term(r)),
    ("homogeneity_H", 6, |r, _| geometry::cayley_menger_h(r)),
];

/// `f(t r) = t^d f(r)` for `t ∈ [0.1, 10]`, relative to the larger side.
pub fn homogeneity(n: usize, seed: u64) -> Vec<IdentityResult> {
    HOMOGENEOUS
        .iter()
        .enumerate()
        .map(|(idx, &(name, deg, f))| {
            let mut rng = stream(seed, 4 + idx as u64);
            let worst = max_over(n, || {
                let r = random_distances(&mut rng);
                let m = MassVector::new(std::array::from_fn(|_| rng.random_range(0.5..2.0))).unwrap();
                let t: f64 = rng.random_range(0.1..10.0);
                let a = f(&r.scaled(t), &m);
                let b = t.powi(deg) * f(&r, &m);
                (a - b).abs() / a.abs().max(b.abs())
            });
            result(name, n, worst, HOMOGENEITY_TOL)
        })
        .collect()
}

/// The whole battery in its fixed reporting order.
pub fn run_battery(n: usize, seed: u64) -> Vec<IdentityResult> {
    let mut out = vec![pech(n, seed), reference_values()];
    out.extend(cyclic_vanishing(n, seed));
    out.push(gradient_parallel(n, seed));
    out.push(circumradius(n, seed));
    out.extend(homogeneity(n, seed));
    out
}

pub fn format_table(results: &[IdentityResult]) -> String {
    let mut s = format!("{:<20} {:>8} {:>24} {:>24}  status\n", "identity", "samples", "max_residual", "threshold");
    for r in results {
        writeln!(
            s,
            "{:<20} {:>8} {:>24.16e} {:>24.16e}  {}",
            r.name,
            r.samples,
            r.max_residual,
            r.threshold,
            if r.passed { "pass" } else { "FAIL" }
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_on_small_sample() {
        let res = run_battery(200, 3);
        assert_eq!(res.len(), 12);
        for r in &res {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn battery_is_deterministic() {
        assert_eq!(run_battery(50, 9), run_battery(50, 9));
    }

    #[test]
    fn non_cyclic_point_breaks_parallelism() {
        let r = DistanceVector::new([1.0, 1.5, 1.1, 0.9, 1.3, 1.2]).unwrap();
        assert!(parallel_deviation(&r) > 1e-3);
    }

    #[test]
    fn table_has_one_line_per_identity() {
        let res = run_battery(10, 1);
        assert_eq!(format_table(&res).lines().count(), res.len() + 1);
    }
}
