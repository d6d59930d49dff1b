//! Independent, slower routes to the quantities computed elsewhere.
//!
//! Nothing here calls into the chart or the closed-form derivatives being
//! checked: central configurations are verified in Cartesian coordinates,
//! derivatives by central differences, chords from explicit points.

use nalgebra::{Matrix4, Matrix6, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceVector, MassVector, PAIRS};
use crate::solver::{self, SolverOptions};

/// Positions of the four bodies in the plane, center of mass at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarConfig {
    pub q: [[f64; 2]; 4],
    pub masses: MassVector,
}

impl PlanarConfig {
    /// Translates `q` so that the center of mass is the origin.
    pub fn centered(q: [[f64; 2]; 4], masses: MassVector) -> Self {
        let m = masses.as_array();
        let total = masses.total();
        let cx = (0..4).map(|i| m[i] * q[i][0]).sum::<f64>() / total;
        let cy = (0..4).map(|i| m[i] * q[i][1]).sum::<f64>() / total;
        PlanarConfig { q: q.map(|p| [p[0] - cx, p[1] - cy]), masses }
    }

    pub fn distances(&self) -> [f64; 6] {
        PAIRS.map(|(i, j)| (self.q[i][0] - self.q[j][0]).hypot(self.q[i][1] - self.q[j][1]))
    }

    pub fn center_of_mass(&self) -> [f64; 2] {
        let m = self.masses.as_array();
        let t = self.masses.total();
        [
            (0..4).map(|i| m[i] * self.q[i][0]).sum::<f64>() / t,
            (0..4).map(|i| m[i] * self.q[i][1]).sum::<f64>() / t,
        ]
    }

    pub fn rotated(&self, angle: f64) -> PlanarConfig {
        let (s, c) = angle.sin_cos();
        PlanarConfig { q: self.q.map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]), masses: self.masses }
    }
}

/// Triangle area from side lengths, Kahan's ordering of Heron's formula.
pub fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * t.max(0.0).sqrt()
}

fn triangle_circumradius(a: f64, b: f64, c: f64) -> f64 {
    a * b * c / (4.0 * heron_area(a, b, c))
}

/// Relative agreement required between the two triangle circumradii.
pub const CIRCUMRADIUS_TOL: f64 = 1e-9;

/// Circumradius from triangle (1,2,3), cross-checked against triangle (1,2,4).
pub fn circumradius(r: &DistanceVector) -> Result<f64> {
    let rc = triangle_circumradius(r.get(0, 1), r.get(1, 2), r.get(0, 2));
    let alt = triangle_circumradius(r.get(0, 1), r.get(1, 3), r.get(0, 3));
    if !rc.is_finite() || !((rc - alt).abs() <= CIRCUMRADIUS_TOL * rc) {
        return Err(Error::NotRealizable(format!(
            "triangles (1,2,3) and (1,2,4) have circumradii {rc} and {alt}"
        )));
    }
    Ok(rc)
}

/// Four points on a circle realizing `r`, sequentially ordered.
///
/// Bodies 1 and 2 go on the x-axis, 3 and 4 above it (the side 12 of a
/// sequentially ordered quadrilateral has the others on one side), from
/// the triangles (1,2,3) and (1,2,4). The remaining distance `r34` and the
/// common circle are then checked.
pub fn embed_cyclic(r: &DistanceVector, m: &MassVector) -> Result<PlanarConfig> {
    circumradius(r)?;
    let r12 = r.get(0, 1);
    let place = |ra: f64, rb: f64| -> [f64; 2] {
        let x = (r12 * r12 + ra * ra - rb * rb) / (2.0 * r12);
        let y = 2.0 * heron_area(r12, ra, rb) / r12;
        [x, y]
    };
    let q = [[0.0, 0.0], [r12, 0.0], place(r.get(0, 2), r.get(1, 2)), place(r.get(0, 3), r.get(1, 3))];
    let cfg = PlanarConfig::centered(q, *m);
    let got = cfg.distances();
    for (k, (a, b)) in got.iter().zip(r.as_array()).enumerate() {
        if !((a - b).abs() <= 1e-9 * b) {
            return Err(Error::NotRealizable(format!(
                "embedded distance {k} is {a}, expected {b}"
            )));
        }
    }
    Ok(cfg)
}

/// Best planar embedding in the least-squares sense (classical scaling).
pub fn mds_planar_embedding(r: &DistanceVector, m: &MassVector) -> PlanarConfig {
    let mut d2 = Matrix4::zeros();
    for &(i, j) in PAIRS.iter() {
        let x = r.get(i, j).powi(2);
        d2[(i, j)] = x;
        d2[(j, i)] = x;
    }
    let j = Matrix4::identity() - Matrix4::from_element(0.25);
    let b = -0.5 * j * d2 * j;
    let eig: SymmetricEigen<f64, nalgebra::U4> = SymmetricEigen::new(b);
    let mut idx: [usize; 4] = [0, 1, 2, 3];
    idx.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
    let q = std::array::from_fn(|i| {
        std::array::from_fn(|axis| {
            let k = idx[axis];
            eig.eigenvalues[k].max(0.0).sqrt() * eig.eigenvectors[(i, k)]
        })
    });
    PlanarConfig::centered(q, *m)
}

/// How λ enters [`cartesian_cc_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaFit {
    Fixed(f64),
    /// One-parameter least squares over λ.
    Fit,
}

/// `max_i ‖Σ_j m_i m_j (q_j − q_i)/r_ij³ − λ m_i q_i‖` and the λ used.
pub fn cartesian_cc_residual(cfg: &PlanarConfig, mode: LambdaFit) -> (f64, f64) {
    let m = cfg.masses.as_array();
    let mut force = [[0.0; 2]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let dx = cfg.q[j][0] - cfg.q[i][0];
            let dy = cfg.q[j][1] - cfg.q[i][1];
            let r3 = dx.hypot(dy).powi(3);
            force[i][0] += m[i] * m[j] * dx / r3;
            force[i][1] += m[i] * m[j] * dy / r3;
        }
    }
    let mq: Vec<[f64; 2]> = (0..4).map(|i| [m[i] * cfg.q[i][0], m[i] * cfg.q[i][1]]).collect();
    let lambda = match mode {
        LambdaFit::Fixed(l) => l,
        LambdaFit::Fit => {
            let num: f64 = (0..4).map(|i| force[i][0] * mq[i][0] + force[i][1] * mq[i][1]).sum();
            let den: f64 = mq.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum();
            num / den
        }
    };
    let res = (0..4)
        .map(|i| (force[i][0] - lambda * mq[i][0]).hypot(force[i][1] - lambda * mq[i][1]))
        .fold(0.0, f64::max);
    (res, lambda)
}

/// Chord vector of four points on a circle, measured between explicit points.
pub fn chord_distances(theta: [f64; 4], radius: f64) -> [f64; 6] {
    let pts = theta.map(|t| [radius * t.cos(), radius * t.sin()]);
    PAIRS.map(|(i, j)| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]))
}

/// Sorted random angles in `[0, 2π)` with every cyclic gap at least `min_gap`.
pub fn random_cyclic_angles<R: Rng>(rng: &mut R, min_gap: f64) -> [f64; 4] {
    let tau = std::f64::consts::TAU;
    loop {
        let mut t: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..tau));
        t.sort_by(f64::total_cmp);
        let gaps = [t[1] - t[0], t[2] - t[1], t[3] - t[2], t[0] + tau - t[3]];
        if gaps.iter().all(|&g| g >= min_gap) {
            return t;
        }
    }
}

/// Default relative step of [`fd_gradient`].
pub const FD_GRAD_STEP: f64 = 1e-5;
/// Default relative step of [`fd_hessian`].
pub const FD_HESS_STEP: f64 = 1e-5;
/// Default relative step of [`fd_gradient_extrapolated`].
pub const FD_EXTRAP_GRAD_STEP: f64 = 1e-4;
/// Default relative step of [`fd_hessian_extrapolated`].
pub const FD_EXTRAP_HESS_STEP: f64 = 1e-4;

fn steps(r: &[f64; 6], h: f64) -> [f64; 6] {
    r.map(|x| h * x.abs().max(1.0))
}

/// Central-difference gradient; the step is `h · max(1, |r_k|)` per coordinate.
pub fn fd_gradient<F: Fn(&[f64; 6]) -> f64>(f: F, r: &[f64; 6], h: Option<f64>) -> [f64; 6] {
    let hs = steps(r, h.unwrap_or(FD_GRAD_STEP));
    std::array::from_fn(|k| {
        let (mut a, mut b) = (*r, *r);
        a[k] += hs[k];
        b[k] -= hs[k];
        (f(&a) - f(&b)) / (2.0 * hs[k])
    })
}

/// Richardson extrapolation of [`fd_gradient`] at steps `h` and `2h`,
/// accurate to fourth order in `h`.
pub fn fd_gradient_extrapolated<F: Fn(&[f64; 6]) -> f64>(f: F, r: &[f64; 6], h: Option<f64>) -> [f64; 6] {
    let h = h.unwrap_or(FD_EXTRAP_GRAD_STEP);
    let fine = fd_gradient(&f, r, Some(h));
    let coarse = fd_gradient(&f, r, Some(2.0 * h));
    std::array::from_fn(|k| (4.0 * fine[k] - coarse[k]) / 3.0)
}

/// Central-difference Hessian.
pub fn fd_hessian<F: Fn(&[f64; 6]) -> f64>(f: F, r: &[f64; 6], h: Option<f64>) -> Matrix6<f64> {
    let hs = steps(r, h.unwrap_or(FD_HESS_STEP));
    let eval = |di: (usize, f64), dj: (usize, f64)| {
        let mut x = *r;
        x[di.0] += di.1;
        x[dj.0] += dj.1;
        f(&x)
    };
    let f0 = f(r);
    let mut out = Matrix6::zeros();
    for i in 0..6 {
        let hi = hs[i];
        out[(i, i)] = (eval((i, hi), (i, 0.0)) - 2.0 * f0 + eval((i, -hi), (i, 0.0))) / (hi * hi);
        for j in 0..i {
            let hj = hs[j];
            let v = (eval((i, hi), (j, hj)) - eval((i, hi), (j, -hj)) - eval((i, -hi), (j, hj))
                + eval((i, -hi), (j, -hj)))
                / (4.0 * hi * hj);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Richardson extrapolation of [`fd_hessian`] at steps `h` and `2h`.
///
/// Near thin configurations the `r⁻³` entries of a Lagrangian Hessian leave
/// plain second differences with a few 1e-6 of relative error at any single
/// step; the extrapolated form stays near 1e-7.
pub fn fd_hessian_extrapolated<F: Fn(&[f64; 6]) -> f64>(f: F, r: &[f64; 6], h: Option<f64>) -> Matrix6<f64> {
    let h = h.unwrap_or(FD_EXTRAP_HESS_STEP);
    (4.0 * fd_hessian(&f, r, Some(h)) - fd_hessian(&f, r, Some(2.0 * h))) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    /// Canonical form of the first member.
    pub representative: DistanceVector,
    #[serde(rename = "U")]
    pub u: f64,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub masses: MassVector,
    pub n_starts: usize,
    pub seed: u64,
    pub cluster_radius: f64,
    pub cluster_count: usize,
    pub clusters: Vec<ClusterSummary>,
    /// One line per start that did not converge.
    pub failures: Vec<String>,
}

impl UniquenessReport {
    /// More than one cluster contradicts uniqueness of the minimum.
    pub fn is_alarm(&self) -> bool {
        self.cluster_count > 1
    }
}

/// Runs independent descents and clusters their endpoints in r-space after
/// identifying mass-preserving relabelings.
pub fn multistart_uniqueness(m: &MassVector, n_starts: usize, seed: u64, opts: &SolverOptions) -> Result<UniquenessReport> {
    let starts = solver::start_points(n_starts, seed, opts.interior_margin)?;
    let runs: Vec<Result<solver::DescentRun>> = starts.par_iter().map(|s| solver::descend(m, s, opts)).collect();
    let mut clusters: Vec<ClusterSummary> = Vec::new();
    let mut failures = Vec::new();
    for (k, run) in runs.into_iter().enumerate() {
        let run = match run {
            Ok(run) if run.converged => run,
            Ok(run) => {
                failures.push(format!("start {k}: not converged, gradient norm {:e}", run.grad_norm));
                continue;
            }
            Err(e) => {
                failures.push(format!("start {k}: {e}"));
                continue;
            }
        };
        let r = solver::canonical_form(&crate::chart::vw_to_r(&run.point, m)?, m);
        match clusters.iter_mut().find(|c| c.representative.distance_to(&r) <= opts.cluster_tol) {
            Some(c) => c.members += 1,
            None => clusters.push(ClusterSummary { representative: r, u: run.value, members: 1 }),
        }
    }
    Ok(UniquenessReport {
        masses: *m,
        n_starts: starts.len(),
        seed,
        cluster_radius: opts.cluster_tol,
        cluster_count: clusters.len(),
        clusters,
        failures,
    })
}
