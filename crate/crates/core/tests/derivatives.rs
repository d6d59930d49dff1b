//! Analytic derivatives against finite differences at random interior points.
//!
//! Interior points keep every `p_ij` above [`MARGIN`]; the Richardson forms of
//! the central differences are used throughout.

use ccc4_core::chart::{self, VWPoint};
use ccc4_core::geometry::{self, DistanceVector, MassVector};
use ccc4_core::oracle;
use ccc4_core::solver::{self, ChartObjective};
use nalgebra::{Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: u64 = 100;
const MARGIN: f64 = 1e-2;

fn random_masses(rng: &mut ChaCha8Rng) -> MassVector {
    let (lo, hi) = (0.2f64.ln(), 5f64.ln());
    MassVector::new(std::array::from_fn(|_| rng.random_range(lo..hi).exp())).unwrap()
}

/// Random masses and a random point of `M⁺` drawn through the chart.
fn interior_point(seed: u64) -> (MassVector, VWPoint, DistanceVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_masses(&mut rng);
    let x = chart::sample_interior(seed, MARGIN).unwrap();
    let r = chart::vw_to_r(&x, &m).unwrap();
    (m, x, r)
}

fn rel_vec(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

fn rel_frob(a: &Matrix6<f64>, b: &Matrix6<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn scalar_gradients_match_finite_differences() {
    let mut worst = [0.0f64; 3];
    for seed in 0..POINTS {
        let (m, _, r) = interior_point(seed);
        let fu = oracle::fd_gradient_extrapolated(|x| geometry::potential_u(&DistanceVector::new(*x).unwrap(), &m), r.as_array(), None);
        let fi = oracle::fd_gradient_extrapolated(
            |x| m.total() * geometry::moment_i(&DistanceVector::new(*x).unwrap(), &m),
            r.as_array(),
            None,
        );
        let fp = oracle::fd_gradient_extrapolated(|x| geometry::ptolemy_p(&DistanceVector::new(*x).unwrap()), r.as_array(), None);
        worst[0] = worst[0].max(rel_vec(&fu, &geometry::grad_u(&r, &m)));
        worst[1] = worst[1].max(rel_vec(&fi, &geometry::grad_mi(&r, &m)));
        worst[2] = worst[2].max(rel_vec(&fp, &geometry::grad_p(&r)));
    }
    println!("max relative gradient error (U, M·I, P): {worst:?}");
    assert!(worst.iter().all(|&w| w <= 1e-6), "{worst:?}");
}

#[test]
fn lagrangian_hessian_matches_finite_differences() {
    let mut worst = 0.0f64;
    for seed in 0..POINTS {
        let (m, _, r) = interior_point(seed);
        let mult = solver::recover_multipliers(&r, &m).unwrap();
        let fd = oracle::fd_hessian_extrapolated(|x| solver::lagrangian(x, &m, mult.lambda, mult.sigma), r.as_array(), None);
        worst = worst.max(rel_frob(&solver::hessian_l(&r, &m, &mult), &fd));
    }
    println!("max relative Frobenius error of hessian_L: {worst:e}");
    assert!(worst <= 1e-6);
}

#[test]
fn chart_objective_derivatives_match_finite_differences() {
    let (mut wg, mut wh) = (0.0f64, 0.0f64);
    for seed in 0..POINTS {
        let (m, x, _) = interior_point(seed);
        let obj = ChartObjective::new(&m);
        let arr = x.as_array();
        let v = Vector6::from_column_slice(&arr);
        let f = |y: &[f64; 6]| obj.value(&Vector6::from_column_slice(y));
        let g: [f64; 6] = obj.gradient(&v).into();
        wg = wg.max(rel_vec(&oracle::fd_gradient_extrapolated(f, &arr, None), &g));
        let fd_h = oracle::fd_hessian_extrapolated(f, &arr, None);
        wh = wh.max(rel_frob(&obj.hessian(&v), &fd_h));
    }
    println!("max relative error of chart gradient {wg:e}, Hessian {wh:e}");
    assert!(wg <= 1e-6 && wh <= 1e-6);
}

#[test]
fn chart_objective_equals_potential() {
    for seed in 0..POINTS {
        let (m, x, r) = interior_point(seed);
        let u = ChartObjective::new(&m).value(&Vector6::from_column_slice(&x.as_array()));
        let expect = geometry::potential_u(&r, &m);
        assert!((u - expect).abs() <= 1e-12 * expect);
    }
}

#[test]
fn potential_blows_up_at_the_boundary() {
    // p34 = eps along a path inside region E, all other p_ij bounded below
    let m = MassVector::equal();
    let obj = ChartObjective::new(&m);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut last = 0.0;
    for k in 1..=8 {
        let eps = 10f64.powi(-k);
        let w1 = h - 2.0 * eps;
        let x = VWPoint { v: [h, 0.0, h], w: [w1, (1.0 - w1 * w1).sqrt(), 0.0] };
        assert!(chart::in_region_e(&x));
        let u = obj.value(&Vector6::from_column_slice(&x.as_array()));
        assert!(u.is_finite() && u > last, "U did not grow at eps = {eps}");
        last = u;
    }
    assert!(last > 1e7);
    let r_edge = chart::vw_to_p_unchecked(&VWPoint { v: [h, 0.0, h], w: [h, h, 0.0] });
    assert_eq!(r_edge.0[5], 0.0);
    assert!(obj.value(&Vector6::from_column_slice(&[h, 0.0, h, h, h, 0.0])).is_infinite());
}
