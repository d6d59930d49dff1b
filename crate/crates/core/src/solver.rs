//! Minimization of the potential on `M⁺` and certification of the result.
//!
//! The iterate lives on `S² × S²` (see [`crate::chart`]). In those
//! coordinates `U = Σ c_ij / p_ij` with `c_ij = (m_i m_j)^{3/2} / √(2M)` and
//! `p` linear in `(v, w)`, so the Euclidean gradient and Hessian are cheap and
//! exact. Steps are Riemannian Newton steps in a tangent basis, retracted by
//! renormalizing `v` and `w`, with a backtracking search that keeps every
//! `p_ij > 0` (the potential is infinite on the boundary of `M⁺`).
//!
//! Multipliers are not carried through the iteration. They are recovered
//! afterwards from the six stationarity equations
//!
//! ```text
//! m_i m_j (r_ij⁻³ − λ) = ± σ r_kl / r_ij      (kl the complementary pair)
//! ```
//!
//! by linear least squares, which gives an independent residual for
//! certification.

use nalgebra::{DMatrix, Matrix4, Matrix6, Matrix6x2, SymmetricEigen, Vector4, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{self, VWPoint, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::geometry::{
    self, cyclic_relabelings, DistanceVector, MassVector, ScalarReport, OPPOSITE, PTOLEMY_SIGN,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Riemannian gradient tolerance, relative to `max(1, |U|)`.
    pub grad_tol: f64,
    /// Bound on `|I − 1|` and `|P|` at an accepted iterate.
    pub constraint_tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
    /// Endpoints of different starts must agree to this distance in r-space.
    pub cluster_tol: f64,
    /// `|K| <= cocircular_tol · (max r)³` classifies as co-circular.
    pub cocircular_tol: f64,
    /// Minimum `p_ij` of random start points.
    pub interior_margin: f64,
    /// Certification thresholds applied to the final record.
    pub cert: CertTolerances,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1e-11,
            constraint_tol: 1e-12,
            max_iter: 500,
            starts: 8,
            seed: 0,
            cluster_tol: 1e-6,
            cocircular_tol: 1e-6,
            interior_margin: 1e-4,
            cert: CertTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertTolerances {
    /// Relative least-squares residual of the stationarity equations.
    pub stationarity: f64,
    pub dziobek: f64,
    /// Relative deviation of each σ² expression from the recovered σ².
    pub sigma_sq: f64,
    pub constraints: f64,
}

impl Default for CertTolerances {
    fn default() -> Self {
        CertTolerances { stationarity: 1e-8, dziobek: 1e-9, sigma_sq: 1e-9, constraints: 1e-10 }
    }
}

/// Lagrange multipliers of `L = U + λM(I − 1) + σP`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub lambda: f64,
    pub sigma: f64,
    /// `‖A(λ, σ) − b‖ / max(1, ‖b‖)` over the six stationarity equations.
    pub stationarity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub rng: String,
    pub seed: u64,
    pub starts: usize,
    pub converged_starts: usize,
    /// Largest r-space distance between converged endpoints and the reported one.
    pub cluster_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub masses: MassVector,
    pub r_star: DistanceVector,
    pub chart_point: VWPoint,
    pub multipliers: Multipliers,
    pub scalars: ScalarReport,
    pub minors: [f64; 6],
    pub a_terms: [f64; 3],
    pub dziobek_residual: f64,
    pub sigma_sq_residuals: [f64; 3],
    pub iterations: usize,
    pub converged: bool,
    pub is_cocircular: bool,
    pub k_value: f64,
    pub metadata: RunMetadata,
}

#[derive(Debug)]
pub enum SolveError {
    Core(Error),
    /// Two starts ended at distinct points; contradicts uniqueness of the minimum.
    UniquenessAlarm { record: Box<SolveRecord>, spread: f64 },
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::Core(e) => e.fmt(f),
            SolveError::UniquenessAlarm { spread, .. } => {
                write!(f, "uniqueness alarm: converged endpoints {spread:e} apart")
            }
        }
    }
}

impl std::error::Error for SolveError {}

impl From<Error> for SolveError {
    fn from(e: Error) -> Self {
        SolveError::Core(e)
    }
}

/// Matrix of `p = A (v, w)`.
#[rustfmt::skip]
fn chart_matrix() -> Matrix6<f64> {
    Matrix6::new(
        0.5,  0.0, 0.0,  0.5, 0.0,  0.0,
        0.0,  0.5, 0.0,  0.0, 0.5,  0.0,
        0.0,  0.0, 0.5,  0.0, 0.0,  0.5,
        0.0,  0.0, 0.5,  0.0, 0.0, -0.5,
        0.0, -0.5, 0.0,  0.0, 0.5,  0.0,
        0.5,  0.0, 0.0, -0.5, 0.0,  0.0,
    )
}

/// `U` as a function of the chart point.
#[derive(Debug, Clone)]
pub struct ChartObjective {
    coeff: Vector6<f64>,
    a: Matrix6<f64>,
}

impl ChartObjective {
    pub fn new(m: &MassVector) -> Self {
        let s = (2.0 * m.total()).sqrt();
        let mm = m.pair_products();
        ChartObjective { coeff: Vector6::from_fn(|k, _| mm[k].powf(1.5) / s), a: chart_matrix() }
    }

    fn p(&self, x: &Vector6<f64>) -> Vector6<f64> {
        self.a * x
    }

    /// `U(x)`, or `+∞` outside the open region.
    pub fn value(&self, x: &Vector6<f64>) -> f64 {
        let p = self.p(x);
        if p.iter().any(|&t| !(t > 0.0)) {
            return f64::INFINITY;
        }
        p.iter().zip(self.coeff.iter()).map(|(t, c)| c / t).sum()
    }

    /// Euclidean gradient in the ambient `R⁶`.
    pub fn gradient(&self, x: &Vector6<f64>) -> Vector6<f64> {
        let p = self.p(x);
        let d = Vector6::from_fn(|k, _| -self.coeff[k] / (p[k] * p[k]));
        self.a.transpose() * d
    }

    /// Euclidean Hessian in the ambient `R⁶`.
    pub fn hessian(&self, x: &Vector6<f64>) -> Matrix6<f64> {
        let p = self.p(x);
        let d = Matrix6::from_diagonal(&Vector6::from_fn(|k, _| 2.0 * self.coeff[k] / p[k].powi(3)));
        self.a.transpose() * d * self.a
    }
}

fn tangent_pair(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = (0..3).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let d = e[0] * u[0] + e[1] * u[1] + e[2] * u[2];
    let t = [e[0] - d * u[0], e[1] - d * u[1], e[2] - d * u[2]];
    let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    let t1 = t.map(|c| c / n);
    let t2 = [
        u[1] * t1[2] - u[2] * t1[1],
        u[2] * t1[0] - u[0] * t1[2],
        u[0] * t1[1] - u[1] * t1[0],
    ];
    (t1, t2)
}

/// Orthonormal basis (columns) of the tangent space of `S² × S²` at `x`.
fn tangent_basis(x: &Vector6<f64>) -> nalgebra::Matrix6x4<f64> {
    let (a1, a2) = tangent_pair([x[0], x[1], x[2]]);
    let (b1, b2) = tangent_pair([x[3], x[4], x[5]]);
    let mut b = nalgebra::Matrix6x4::zeros();
    for k in 0..3 {
        b[(k, 0)] = a1[k];
        b[(k, 1)] = a2[k];
        b[(k + 3, 2)] = b1[k];
        b[(k + 3, 3)] = b2[k];
    }
    b
}

fn retract(x: &Vector6<f64>) -> Vector6<f64> {
    let p = VWPoint::from_array(std::array::from_fn(|k| x[k])).renormalized();
    Vector6::from_column_slice(&p.as_array())
}

/// Riemannian gradient: each block of the Euclidean gradient minus its normal part.
fn riemannian_gradient(x: &Vector6<f64>, g: &Vector6<f64>) -> (Vector6<f64>, f64, f64) {
    let av = x[0] * g[0] + x[1] * g[1] + x[2] * g[2];
    let aw = x[3] * g[3] + x[4] * g[4] + x[5] * g[5];
    let mut rg = *g;
    for k in 0..3 {
        rg[k] -= av * x[k];
        rg[k + 3] -= aw * x[k + 3];
    }
    (rg, av, aw)
}

/// Outcome of one descent from one start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentRun {
    pub point: VWPoint,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_STEP: f64 = 0.3;

/// Riemannian Newton descent from `start` (which must lie in the open region).
pub fn descend(m: &MassVector, start: &VWPoint, opts: &SolverOptions) -> Result<DescentRun> {
    let obj = ChartObjective::new(m);
    let mut x = retract(&Vector6::from_column_slice(&start.as_array()));
    let mut f = obj.value(&x);
    if !f.is_finite() {
        return Err(Error::NoValidStart);
    }
    let total_mass = m.total();
    let ptolemy_scale = 2.0 * total_mass / m.product_all().sqrt();

    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm;
    loop {
        let g = obj.gradient(&x);
        let (rg, av, aw) = riemannian_gradient(&x, &g);
        grad_norm = rg.norm();

        let vw = VWPoint::from_array(std::array::from_fn(|k| x[k]));
        let nv = vw.v.iter().map(|t| t * t).sum::<f64>();
        let nw = vw.w.iter().map(|t| t * t).sum::<f64>();
        // I − 1 and P in r-space
        let i_res = 0.5 * (nv + nw) - 1.0;
        let p_res = ptolemy_scale * 0.25 * (nv - nw);
        if grad_norm <= opts.grad_tol * f.abs().max(1.0)
            && i_res.abs() <= opts.constraint_tol
            && p_res.abs() <= opts.constraint_tol
        {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let basis = tangent_basis(&x);
        let gr: Vector4<f64> = basis.transpose() * g;
        let mut hr: Matrix4<f64> = basis.transpose() * obj.hessian(&x) * basis;
        for k in 0..2 {
            hr[(k, k)] -= av;
            hr[(k + 2, k + 2)] -= aw;
        }
        let hr = 0.5 * (hr + hr.transpose());
        let dir = match hr.cholesky() {
            Some(ch) => -ch.solve(&gr),
            None => {
                // indefinite: flip and floor the eigenvalues
                let eig = SymmetricEigen::new(hr);
                let floor = 1e-8 * eig.eigenvalues.amax().max(1e-300);
                let mut d = Vector4::zeros();
                for k in 0..4 {
                    let q = eig.eigenvectors.column(k);
                    let lam = eig.eigenvalues[k].abs().max(floor);
                    d -= q * (q.dot(&gr) / lam);
                }
                d
            }
        };
        let step = basis * dir;
        let slope = gr.dot(&dir);
        let mut t = (MAX_STEP / step.norm()).min(1.0);
        let noise = 8.0 * f64::EPSILON * f.abs();
        let mut accepted = false;
        while t > 1e-12 {
            let xn = retract(&(x + step * t));
            let fnew = obj.value(&xn);
            if fnew.is_finite() {
                let sufficient = fnew <= f + 1e-4 * t * slope;
                let flat = fnew <= f + noise && {
                    let (rgn, _, _) = riemannian_gradient(&xn, &obj.gradient(&xn));
                    rgn.norm() < grad_norm
                };
                if sufficient || flat {
                    x = xn;
                    f = fnew;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(DescentRun {
        point: VWPoint::from_array(std::array::from_fn(|k| x[k])),
        value: f,
        grad_norm,
        iterations,
        converged,
    })
}

/// Seed of the k-th random start.
pub fn start_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64)
}

/// Start points: the equal-mass square first, then region-E samples.
pub fn start_points(starts: usize, seed: u64, margin: f64) -> Result<Vec<VWPoint>> {
    let mut out = vec![VWPoint::square()];
    for k in 1..starts.max(1) {
        out.push(chart::sample_interior(start_seed(seed, k), margin)?);
    }
    Ok(out)
}

/// Lexicographically smallest relabeling among the order-preserving
/// relabelings that also preserve the masses.
pub fn canonical_form(r: &DistanceVector, m: &MassVector) -> DistanceVector {
    let mass = m.as_array();
    let scale = m.total();
    cyclic_relabelings()
        .into_iter()
        .filter(|perm| (0..4).all(|i| (mass[perm[i]] - mass[i]).abs() <= 1e-12 * scale))
        .map(|perm| r.relabel(perm))
        .min_by(|a, b| {
            a.as_array()
                .iter()
                .zip(b.as_array().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("identity relabeling always qualifies")
}

/// Minimizer of `U` on `M⁺` for the given masses, fully evaluated.
pub fn minimize_u(m: &MassVector, opts: &SolverOptions) -> std::result::Result<SolveRecord, SolveError> {
    let starts = start_points(opts.starts, opts.seed, opts.interior_margin)?;
    let runs: Vec<Result<DescentRun>> = starts.par_iter().map(|s| descend(m, s, opts)).collect();
    let runs: Vec<DescentRun> = runs.into_iter().filter_map(|r| r.ok()).collect();
    if runs.is_empty() {
        return Err(Error::NoValidStart.into());
    }
    let converged: Vec<&DescentRun> = runs.iter().filter(|r| r.converged).collect();
    let best = if converged.is_empty() {
        runs.iter().min_by(|a, b| a.value.total_cmp(&b.value)).unwrap()
    } else {
        *converged.iter().min_by(|a, b| a.value.total_cmp(&b.value)).unwrap()
    };

    let best_r = chart::vw_to_r(&best.point, m)?;
    let canon = canonical_form(&best_r, m);
    let mut spread: f64 = 0.0;
    for run in &converged {
        let r = chart::vw_to_r(&run.point, m)?;
        spread = spread.max(canonical_form(&r, m).distance_to(&canon));
    }
    let meta = RunMetadata {
        rng: RNG_ALGORITHM.to_string(),
        seed: opts.seed,
        starts: starts.len(),
        converged_starts: converged.len(),
        cluster_spread: spread,
    };
    let record = build_record(m, best, meta, opts)?;
    if spread > opts.cluster_tol {
        return Err(SolveError::UniquenessAlarm { record: Box::new(record), spread });
    }
    Ok(record)
}

/// Assembles a record for a descent endpoint.
pub fn build_record(
    m: &MassVector,
    run: &DescentRun,
    metadata: RunMetadata,
    opts: &SolverOptions,
) -> Result<SolveRecord> {
    let r = chart::vw_to_r(&run.point, m)?;
    let mult = recover_multipliers(&r, m)?;
    let h = hessian_l(&r, m, &mult);
    let minors = principal_minors(&h);
    let a = a_terms(&r, m, &mult);
    let k_value = geometry::k_term(&r);
    let mut rec = SolveRecord {
        masses: *m,
        r_star: r,
        chart_point: run.point,
        multipliers: mult,
        scalars: ScalarReport::evaluate(&r, m),
        minors,
        a_terms: a.raw,
        dziobek_residual: dziobek_residual(&r, mult.lambda),
        sigma_sq_residuals: sigma_sq_residuals(&r, m, &mult),
        iterations: run.iterations,
        converged: run.converged,
        is_cocircular: false,
        k_value,
        metadata,
    };
    rec.is_cocircular = classify_cocircular(&rec, opts.cocircular_tol);
    Ok(rec)
}

/// Rows `(m_i m_j, ±r_kl / r_ij)` and right-hand side `m_i m_j r_ij⁻³`.
fn stationarity_system(r: &DistanceVector, m: &MassVector) -> (Matrix6x2<f64>, Vector6<f64>) {
    let d = r.as_array();
    let mm = m.pair_products();
    let mut a = Matrix6x2::zeros();
    let mut b = Vector6::zeros();
    for k in 0..6 {
        a[(k, 0)] = mm[k];
        a[(k, 1)] = PTOLEMY_SIGN[k] * d[OPPOSITE[k]] / d[k];
        b[k] = mm[k] / d[k].powi(3);
    }
    (a, b)
}

/// Relative residual of the stationarity equations at given multipliers.
pub fn stationarity_residual(r: &DistanceVector, m: &MassVector, lambda: f64, sigma: f64) -> f64 {
    let (a, b) = stationarity_system(r, m);
    let x = nalgebra::Vector2::new(lambda, sigma);
    (a * x - b).norm() / b.norm().max(1.0)
}

/// Least-squares `(λ, σ)` for the six stationarity equations.
pub fn recover_multipliers(r: &DistanceVector, m: &MassVector) -> Result<Multipliers> {
    let (a, b) = stationarity_system(r, m);
    let svd = a.svd(true, true);
    let (s0, s1) = (svd.singular_values[0].max(svd.singular_values[1]), svd.singular_values[0].min(svd.singular_values[1]));
    if !(s1 > 1e-12 * s0) {
        return Err(Error::RankDeficient(s0, s1));
    }
    let x = svd.solve(&b, 0.0).map_err(|_| Error::RankDeficient(s0, s1))?;
    let (lambda, sigma) = (x[0], x[1]);
    Ok(Multipliers { lambda, sigma, stationarity_residual: stationarity_residual(r, m, lambda, sigma) })
}

/// `L(r; λ, σ) = U + λM(I − 1) + σP` on an unchecked array.
pub fn lagrangian(r: &[f64; 6], m: &MassVector, lambda: f64, sigma: f64) -> f64 {
    let mm = m.pair_products();
    let u: f64 = (0..6).map(|k| mm[k] / r[k]).sum();
    let mi: f64 = (0..6).map(|k| mm[k] * r[k] * r[k]).sum::<f64>() * 0.5;
    let p = r[0] * r[5] + r[2] * r[3] - r[1] * r[4];
    u + lambda * (mi - m.total()) + sigma * p
}

/// `diag(f_ij) + adiag(σ, −σ, σ, σ, −σ, σ)` with `f_ij = m_i m_j (2 r_ij⁻³ + λ)`.
pub fn hessian_l(r: &DistanceVector, m: &MassVector, mult: &Multipliers) -> Matrix6<f64> {
    let d = r.as_array();
    let mm = m.pair_products();
    let mut h = Matrix6::zeros();
    for k in 0..6 {
        h[(k, k)] = mm[k] * (2.0 / d[k].powi(3) + mult.lambda);
        h[(k, OPPOSITE[k])] = PTOLEMY_SIGN[k] * mult.sigma;
    }
    h
}

/// Leading principal minors of orders 1..6, each by LU of the top-left block.
pub fn principal_minors(h: &Matrix6<f64>) -> [f64; 6] {
    std::array::from_fn(|k| {
        let n = k + 1;
        DMatrix::from_fn(n, n, |i, j| h[(i, j)]).determinant()
    })
}

/// The three A-terms, pairing (12,34), (14,23), (13,24).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ATerms {
    /// With `σ²` as given.
    pub raw: [f64; 3],
    /// `3 m1m2m3m4 (λ r_ij³ + λ r_kl³ + 1)`, equal to `raw` at a critical point.
    pub on_shell: [f64; 3],
}

const A_PAIRS: [(usize, usize); 3] = [(0, 5), (2, 3), (1, 4)];

pub fn a_terms(r: &DistanceVector, m: &MassVector, mult: &Multipliers) -> ATerms {
    let d = r.as_array();
    let mprod = m.product_all();
    let (l, s2) = (mult.lambda, mult.sigma * mult.sigma);
    let raw = A_PAIRS.map(|(i, j)| {
        let (a, b) = (d[i].powi(3), d[j].powi(3));
        mprod * (l * l * a * b + 2.0 * l * a + 2.0 * l * b + 4.0) - a * b * s2
    });
    let on_shell = A_PAIRS.map(|(i, j)| 3.0 * mprod * (l * d[i].powi(3) + l * d[j].powi(3) + 1.0));
    ATerms { raw, on_shell }
}

/// Closed-form leading principal minors built from the A-terms.
pub fn minors_closed_form(r: &DistanceVector, m: &MassVector, mult: &Multipliers) -> [f64; 6] {
    let [m1, m2, m3, m4] = *m.as_array();
    let c = r.as_array().map(|x| x.powi(3));
    let [c12, c13, c14, c23, c24, c34] = c;
    let l = mult.lambda;
    let [a0, a1, a2] = a_terms(r, m, mult).raw;
    [
        (l * c12 + 2.0) * m1 * m2 / c12,
        (l * c12 + 2.0) * (l * c13 + 2.0) * m1 * m1 * m2 * m3 / (c12 * c13),
        (l * c12 + 2.0) * (l * c13 + 2.0) * (l * c14 + 2.0) * m1.powi(3) * m2 * m3 * m4 / (c12 * c13 * c14),
        m1 * m1 * m2 * m3 / (c13 * c14 * c23) * (2.0 / c12 + l) * (l * c13 + 2.0) * a1,
        m1 * m2 / (c13 * c14 * c23 * c24) * (2.0 / c12 + l) * a1 * a2,
        a0 * a1 * a2 / (c12 * c13 * c14 * c23 * c24 * c34),
    ]
}

fn dziobek_factors(r: &DistanceVector, lambda: f64) -> [f64; 3] {
    let d = r.as_array().map(|x| x.powi(-3) - lambda);
    [d[0] * d[5], d[1] * d[4], d[2] * d[3]]
}

/// Largest mismatch between the (12,34) product and the (13,24), (14,23) products.
pub fn dziobek_residual(r: &DistanceVector, lambda: f64) -> f64 {
    let [a, b, c] = dziobek_factors(r, lambda);
    (a - b).abs().max((a - c).abs())
}

/// The three σ² expressions, pairing (12,34), (14,23), (13,24).
pub fn sigma_sq_values(r: &DistanceVector, m: &MassVector, lambda: f64) -> [f64; 3] {
    let [a, b, c] = dziobek_factors(r, lambda);
    let mp = m.product_all();
    [mp * a, mp * c, mp * b]
}

/// `|σ²_k − σ²| / σ²` for the three σ² expressions.
pub fn sigma_sq_residuals(r: &DistanceVector, m: &MassVector, mult: &Multipliers) -> [f64; 3] {
    let s2 = mult.sigma * mult.sigma;
    sigma_sq_values(r, m, mult.lambda).map(|x| (x - s2).abs() / s2)
}

/// `|K(r*)| <= tol · (max r)³`.
pub fn classify_cocircular(rec: &SolveRecord, tol: f64) -> bool {
    rec.k_value.abs() <= tol * rec.r_star.max().powi(3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub checks: Vec<Check>,
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, value: f64, threshold: f64, passed: bool) {
        self.checks.push(Check { name: name.to_string(), value, threshold, passed });
    }
}

/// Re-derives every certification quantity from the record's masses,
/// distances and multipliers; stored minors and residuals are not trusted.
pub fn certify_minimum(rec: &SolveRecord, tol: &CertTolerances) -> CertReport {
    let (r, m) = (&rec.r_star, &rec.masses);
    let mult = rec.multipliers;
    let mut report = CertReport { checks: Vec::new() };

    report.push("converged", rec.converged as u8 as f64, 1.0, rec.converged);
    let i_res = (geometry::moment_i(r, m) - 1.0).abs();
    let p_res = geometry::ptolemy_p(r).abs();
    report.push("constraint_I", i_res, tol.constraints, i_res <= tol.constraints);
    report.push("constraint_P", p_res, tol.constraints, p_res <= tol.constraints);
    report.push("lambda_positive", mult.lambda, 0.0, mult.lambda > 0.0);

    let st = stationarity_residual(r, m, mult.lambda, mult.sigma);
    report.push("stationarity", st, tol.stationarity, st <= tol.stationarity);

    let h = hessian_l(r, m, &mult);
    let minors = principal_minors(&h);
    let min_minor = minors.iter().copied().fold(f64::INFINITY, f64::min);
    report.push("minors_positive", min_minor, 0.0, min_minor > 0.0);
    let chol = h.cholesky().is_some();
    report.push("cholesky_agrees", chol as u8 as f64, 1.0, chol == (min_minor > 0.0));

    let dz = dziobek_residual(r, mult.lambda);
    report.push("dziobek", dz, tol.dziobek, dz <= tol.dziobek);
    let s2 = sigma_sq_residuals(r, m, &mult).into_iter().fold(0.0, f64::max);
    report.push("sigma_sq", s2, tol.sigma_sq, s2 <= tol.sigma_sq);
    report
}
