//! Masses from a cyclic shape.
//!
//! Read with `r` given, the stationarity equations are linear in the six
//! products `m_i m_j`. The multiplier λ comes from the Dziobek relation, σ
//! only fixes the overall mass scale, and the individual masses follow from
//! ratios such as `m1² = (m1m2)(m1m3)/(m2m3)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, DistanceVector, MassVector, OPPOSITE, PAIRS, PAIR_NAMES, PTOLEMY_SIGN};

/// Four bodies on a circle, numbered in angular order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeFields")]
pub struct CyclicShape {
    pub theta: [f64; 4],
    pub radius: f64,
}

#[derive(Deserialize)]
struct ShapeFields {
    theta: [f64; 4],
    #[serde(default = "unit")]
    radius: f64,
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<ShapeFields> for CyclicShape {
    type Error = Error;
    fn try_from(f: ShapeFields) -> Result<Self> {
        CyclicShape::new(f.theta, f.radius)
    }
}

impl CyclicShape {
    /// Angles in radians, strictly increasing within `[0, 2π)`.
    pub fn new(theta: [f64; 4], radius: f64) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidShape(format!("radius must be positive, got {radius}")));
        }
        if theta.iter().any(|t| !(t.is_finite() && *t >= 0.0 && *t < tau)) {
            return Err(Error::InvalidShape("angles must lie in [0, 2π)".into()));
        }
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidShape("angles must be strictly increasing (no coincident bodies)".into()));
        }
        Ok(CyclicShape { theta, radius })
    }

    pub fn from_degrees(deg: [f64; 4], radius: f64) -> Result<Self> {
        CyclicShape::new(deg.map(f64::to_radians), radius)
    }
}

/// Chord lengths `2R sin((θ_j − θ_i)/2)`.
pub fn shape_to_distances(s: &CyclicShape) -> DistanceVector {
    let r = PAIRS.map(|(i, j)| 2.0 * s.radius * (0.5 * (s.theta[j] - s.theta[i])).sin());
    DistanceVector::new(r).expect("validated shape has distinct angles")
}

/// λ from the two independent equalities of the Dziobek relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DziobekLambda {
    /// From `(r12⁻³−λ)(r34⁻³−λ) = (r13⁻³−λ)(r24⁻³−λ)`.
    pub lambda_a: f64,
    /// From `(r14⁻³−λ)(r23⁻³−λ) = (r13⁻³−λ)(r24⁻³−λ)`.
    pub lambda_b: f64,
    pub compat_residual: f64,
}

fn solve_pairing(a: [f64; 6], first: (usize, usize), name: &str) -> Result<f64> {
    let (i, j) = first;
    let den = (a[i] + a[j]) - (a[1] + a[4]);
    let scale = a.iter().copied().fold(0.0, f64::max);
    if den.abs() <= 1e-12 * scale {
        return Err(Error::Indeterminate(format!(
            "r{0}⁻³ + r{1}⁻³ equals r13⁻³ + r24⁻³ (pairing {name})",
            PAIR_NAMES[i], PAIR_NAMES[j]
        )));
    }
    Ok((a[i] * a[j] - a[1] * a[4]) / den)
}

pub fn dziobek_lambda(r: &DistanceVector) -> Result<DziobekLambda> {
    let a = r.as_array().map(|x| x.powi(-3));
    let lambda_a = solve_pairing(a, (0, 5), "a")?;
    let lambda_b = solve_pairing(a, (2, 3), "b")?;
    Ok(DziobekLambda { lambda_a, lambda_b, compat_residual: (lambda_a - lambda_b).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRecovery {
    /// Normalized to total mass 4.
    pub masses: MassVector,
    /// Multipliers at the `I = 1` rescaling of the shape.
    pub lambda: f64,
    pub sigma: f64,
    pub compat_residual: f64,
    /// Largest relative residual among the six stationarity equations.
    pub equation_residual: f64,
    /// Number of rescale/recover rounds performed.
    pub rounds: usize,
    /// The shape rescaled to `I = 1` for the recovered masses.
    pub r_normalized: DistanceVector,
}

/// Default compatibility tolerance on `|λ_a − λ_b|`.
pub const COMPAT_TOL: f64 = 1e-9;
const MAX_ROUNDS: usize = 5;

/// One recovery at a fixed scale: `(masses, λ, compat residual)`.
fn recover_once(r: &DistanceVector, tol: f64) -> Result<(MassVector, f64, f64)> {
    let dl = dziobek_lambda(r)?;
    if dl.compat_residual > tol {
        return Err(Error::Infeasible(format!(
            "Dziobek relation incompatible: |λ_a − λ_b| = {:e} > {tol:e}",
            dl.compat_residual
        )));
    }
    let lambda = 0.5 * (dl.lambda_a + dl.lambda_b);
    if !(lambda > 0.0) {
        return Err(Error::Infeasible(format!("λ = {lambda} is not positive")));
    }
    let d = r.as_array();
    let a = d.map(|x| x.powi(-3));
    let scale = a.iter().copied().fold(0.0, f64::max);
    let mut prod = [0.0; 6];
    for k in 0..6 {
        let den = a[k] - lambda;
        if den.abs() <= 1e-12 * scale {
            return Err(Error::Indeterminate(format!("λ coincides with r{}⁻³", PAIR_NAMES[k])));
        }
        // σ = 1 for now
        prod[k] = PTOLEMY_SIGN[k] * d[OPPOSITE[k]] / d[k] / den;
    }
    // σ must carry the sign that makes the products positive
    if prod[0] < 0.0 {
        prod = prod.map(|x| -x);
    }
    if let Some(k) = (0..6).find(|&k| !(prod[k] > 0.0)) {
        return Err(Error::Infeasible(format!("mass product m{0}m{1} is negative", PAIRS[k].0 + 1, PAIRS[k].1 + 1)));
    }
    let [p12, p13, p14, p23, p24, _] = prod;
    let squares = [p12 * p13 / p23, p12 * p23 / p13, p13 * p23 / p12, p14 * p24 / p12];
    if let Some(k) = (0..4).find(|&k| !(squares[k] > 0.0)) {
        return Err(Error::Infeasible(format!("m{}² is not positive", k + 1)));
    }
    let masses = MassVector::new(squares.map(f64::sqrt))?.with_total(4.0);
    Ok((masses, lambda, dl.compat_residual))
}

/// Recovers the positive masses (total 4) for which `r` is a critical point of
/// `U` on `M⁺`, or explains why none exist.
pub fn masses_from_shape(r: &DistanceVector, tol: f64) -> Result<MassRecovery> {
    let mut masses = MassVector::equal();
    let mut rounds = 0;
    let (mut lambda, mut compat);
    loop {
        rounds += 1;
        let rs = r.normalized(&masses);
        let (next, l, c) = recover_once(&rs, tol)?;
        lambda = l;
        compat = c;
        let change = next.relative_distance(&masses);
        masses = next;
        if change <= 1e-14 || rounds >= MAX_ROUNDS {
            break;
        }
    }
    let rs = r.normalized(&masses);
    // λ is scale dependent; report it for the final normalization
    if let Ok(dl) = dziobek_lambda(&rs) {
        lambda = 0.5 * (dl.lambda_a + dl.lambda_b);
        compat = dl.compat_residual;
    }
    let d = rs.as_array();
    let mm = masses.pair_products();
    // σ from each equation, then its mean
    let sig: Vec<f64> = (0..6)
        .map(|k| mm[k] * (d[k].powi(-3) - lambda) * d[k] / (PTOLEMY_SIGN[k] * d[OPPOSITE[k]]))
        .collect();
    let sigma = sig.iter().sum::<f64>() / 6.0;
    let equation_residual = (0..6)
        .map(|k| {
            let lhs = mm[k] * (d[k].powi(-3) - lambda);
            let rhs = PTOLEMY_SIGN[k] * sigma * d[OPPOSITE[k]] / d[k];
            (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
        })
        .fold(0.0, f64::max);
    debug_assert!(geometry::moment_i(&rs, &masses) - 1.0 < 1e-12);
    Ok(MassRecovery { masses, lambda, sigma, compat_residual: compat, equation_residual, rounds, r_normalized: rs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn unit_square_shape() -> CyclicShape {
        CyclicShape::new([0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2], 1.0).unwrap()
    }

    #[test]
    fn square_chords() {
        let r = shape_to_distances(&unit_square_shape());
        let expect = [SQRT_2, 2.0, SQRT_2, SQRT_2, 2.0, SQRT_2];
        for k in 0..6 {
            assert_relative_eq!(r.as_array()[k], expect[k], epsilon = 1e-15);
        }
        assert!(geometry::ptolemy_p(&r).abs() <= 1e-13);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(CyclicShape::from_degrees([0.0, 0.0, 90.0, 180.0], 1.0).is_err());
        assert!(CyclicShape::from_degrees([0.0, 90.0, 80.0, 180.0], 1.0).is_err());
        assert!(CyclicShape::from_degrees([0.0, 90.0, 180.0, 360.0], 1.0).is_err());
        assert!(CyclicShape::new([0.0, 1.0, 2.0, 3.0], -1.0).is_err());
    }

    #[test]
    fn radius_scales_chords() {
        let s = CyclicShape::new([0.1, 1.3, 2.9, 4.4], 1.0).unwrap();
        let t = CyclicShape { radius: 2.5, ..s };
        let (a, b) = (shape_to_distances(&s), shape_to_distances(&t));
        for k in 0..6 {
            assert_relative_eq!(b.as_array()[k], 2.5 * a.as_array()[k], max_relative = 1e-15);
        }
        assert!(geometry::k_term(&a).abs() <= 1e-12);
    }

    #[test]
    fn square_lambda() {
        let dl = dziobek_lambda(&shape_to_distances(&unit_square_shape())).unwrap();
        // (2^{-3/2}·2^{-3/2} − 8⁻¹·8⁻¹) / (2·2^{-3/2} − 2·8⁻¹)
        assert_relative_eq!(dl.lambda_a, 0.109375 / 0.4571067811865476, epsilon = 1e-12);
        assert_relative_eq!(dl.lambda_a, 0.23927669529663692, epsilon = 1e-12);
        assert_relative_eq!(dl.lambda_b, dl.lambda_a, epsilon = 1e-15);
        assert!(dl.compat_residual <= 1e-15);
    }

    #[test]
    fn square_masses() {
        let rec = masses_from_shape(&shape_to_distances(&unit_square_shape()), COMPAT_TOL).unwrap();
        for x in rec.masses.as_array() {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-12);
        }
        assert!(rec.equation_residual <= 1e-12);
    }

    #[test]
    fn generic_shape_is_infeasible() {
        let s = CyclicShape::from_degrees([0.0, 50.0, 180.0, 300.0], 1.0).unwrap();
        let r = shape_to_distances(&s);
        assert!(dziobek_lambda(&r).unwrap().compat_residual > 1e-3);
        assert!(matches!(masses_from_shape(&r, COMPAT_TOL), Err(Error::Infeasible(_))));
    }

    #[test]
    fn equal_sums_are_indeterminate() {
        // all equal distances make both pairings 0/0
        let r = DistanceVector::new([1.0; 6]).unwrap();
        assert!(matches!(dziobek_lambda(&r), Err(Error::Indeterminate(_))));
    }
}
