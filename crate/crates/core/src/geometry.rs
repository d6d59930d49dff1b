//! Scalar functions of the mutual-distance vector.
//!
//! Distances are always stored in the order `(r12, r13, r14, r23, r24, r34)`.
//! Bodies are assumed to be numbered sequentially around the quadrilateral, so
//! `r13` and `r24` are the diagonals. Relabeling is the caller's job.

use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Body index pairs in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Human-readable pair labels in storage order.
pub const PAIR_NAMES: [&str; 6] = ["12", "13", "14", "23", "24", "34"];

/// Index of the complementary pair: 12↔34, 13↔24, 14↔23.
pub const OPPOSITE: [usize; 6] = [5, 4, 3, 2, 1, 0];

/// Coefficient sign of each pair product in the Ptolemy expression.
pub const PTOLEMY_SIGN: [f64; 6] = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];

/// Storage index of the pair `{i, j}` (zero-based bodies, `i != j`).
pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("invalid body pair ({i}, {j})"),
    }
}

/// The eight relabelings that preserve the cyclic order 1-2-3-4 (dihedral group).
pub fn cyclic_relabelings() -> [[usize; 4]; 8] {
    let mut out = [[0; 4]; 8];
    for k in 0..4 {
        for i in 0..4 {
            out[k][i] = (i + k) % 4;
            out[k + 4][i] = (k + 4 - i) % 4;
        }
    }
    out
}

/// Six positive mutual distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistanceFields", into = "DistanceFields")]
pub struct DistanceVector([f64; 6]);

#[derive(Serialize, Deserialize)]
struct DistanceFields {
    r12: f64,
    r13: f64,
    r14: f64,
    r23: f64,
    r24: f64,
    r34: f64,
}

impl TryFrom<DistanceFields> for DistanceVector {
    type Error = Error;
    fn try_from(f: DistanceFields) -> Result<Self> {
        DistanceVector::new([f.r12, f.r13, f.r14, f.r23, f.r24, f.r34])
    }
}

impl From<DistanceVector> for DistanceFields {
    fn from(r: DistanceVector) -> Self {
        let [r12, r13, r14, r23, r24, r34] = r.0;
        DistanceFields { r12, r13, r14, r23, r24, r34 }
    }
}

impl DistanceVector {
    pub fn new(r: [f64; 6]) -> Result<Self> {
        for (k, &x) in r.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonPositiveDistance { pair: PAIR_NAMES[k], value: x });
            }
        }
        Ok(DistanceVector(r))
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[pair_index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: f64) -> DistanceVector {
        DistanceVector(self.0.map(|x| x * k))
    }

    /// Rescales so that `I(r, m) = 1`.
    pub fn normalized(&self, m: &MassVector) -> DistanceVector {
        self.scaled(moment_i(self, m).sqrt().recip())
    }

    /// Distance vector after renaming body `i` to `perm[i]`: the new `r_ij`
    /// is the old `r_{perm[i] perm[j]}`.
    pub fn relabel(&self, perm: [usize; 4]) -> DistanceVector {
        let mut out = [0.0; 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            out[k] = self.get(perm[i], perm[j]);
        }
        DistanceVector(out)
    }

    pub fn distance_to(&self, other: &DistanceVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Four positive masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MassFields", into = "MassFields")]
pub struct MassVector([f64; 4]);

#[derive(Serialize, Deserialize)]
struct MassFields {
    m1: f64,
    m2: f64,
    m3: f64,
    m4: f64,
    #[serde(rename = "M", default)]
    total: Option<f64>,
}

impl TryFrom<MassFields> for MassVector {
    type Error = Error;
    fn try_from(f: MassFields) -> Result<Self> {
        let m = MassVector::new([f.m1, f.m2, f.m3, f.m4])?;
        if let Some(total) = f.total {
            if (total - m.total()).abs() > 1e-12 * m.total() {
                return Err(Error::InvalidInput(format!(
                    "total mass M = {total} does not match the sum {}",
                    m.total()
                )));
            }
        }
        Ok(m)
    }
}

impl From<MassVector> for MassFields {
    fn from(m: MassVector) -> Self {
        let [m1, m2, m3, m4] = m.0;
        MassFields { m1, m2, m3, m4, total: Some(m.total()) }
    }
}

impl MassVector {
    pub fn new(m: [f64; 4]) -> Result<Self> {
        for (k, &x) in m.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonPositiveMass { index: k + 1, value: x });
            }
        }
        Ok(MassVector(m))
    }

    pub fn equal() -> Self {
        MassVector([1.0; 4])
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `m_i m_j` for every pair, in storage order.
    pub fn pair_products(&self) -> [f64; 6] {
        PAIRS.map(|(i, j)| self.0[i] * self.0[j])
    }

    pub fn product_all(&self) -> f64 {
        self.0.iter().product()
    }

    /// Rescaled copy with the given total mass.
    pub fn with_total(&self, total: f64) -> MassVector {
        let k = total / self.total();
        MassVector(self.0.map(|x| x * k))
    }

    /// Largest relative component difference after both are normalized to the same total.
    pub fn relative_distance(&self, other: &MassVector) -> f64 {
        let a = self.with_total(4.0);
        let b = other.with_total(4.0);
        a.0.iter()
            .zip(b.0.iter())
            .map(|(x, y)| (x - y).abs() / y.abs())
            .fold(0.0, f64::max)
    }
}

/// Values of the six scalar functions at one `(r, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarReport {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    /// Volume from `H = 288 V²`; zero when `H <= 0`.
    #[serde(rename = "V")]
    pub v: f64,
}

impl ScalarReport {
    pub fn evaluate(r: &DistanceVector, m: &MassVector) -> Self {
        let h = cayley_menger_h(r);
        ScalarReport {
            u: potential_u(r, m),
            i: moment_i(r, m),
            p: ptolemy_p(r),
            h,
            k: k_term(r),
            q: q_term(r),
            v: (h.max(0.0) / 288.0).sqrt(),
        }
    }
}

pub fn potential_u(r: &DistanceVector, m: &MassVector) -> f64 {
    let mm = m.pair_products();
    r.0.iter().zip(mm.iter()).map(|(x, w)| w / x).sum()
}

pub fn moment_i(r: &DistanceVector, m: &MassVector) -> f64 {
    let mm = m.pair_products();
    let s: f64 = r.0.iter().zip(mm.iter()).map(|(x, w)| w * x * x).sum();
    s / (2.0 * m.total())
}

pub fn ptolemy_p(r: &DistanceVector) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.0;
    r12 * r34 + r14 * r23 - r13 * r24
}

/// Bordered 5×5 Cayley–Menger determinant, `H = 288 V²`, by LU with partial pivoting.
pub fn cayley_menger_h(r: &DistanceVector) -> f64 {
    cayley_menger_raw(&r.0)
}

/// Same as [`cayley_menger_h`] on an unchecked array (used by finite differences).
pub fn cayley_menger_raw(r: &[f64; 6]) -> f64 {
    let s = r.map(|x| x * x);
    let [d12, d13, d14, d23, d24, d34] = s;
    #[rustfmt::skip]
    let cm = Matrix5::new(
        0.0, 1.0, 1.0, 1.0, 1.0,
        1.0, 0.0, d12, d13, d14,
        1.0, d12, 0.0, d23, d24,
        1.0, d13, d23, 0.0, d34,
        1.0, d14, d24, d34, 0.0,
    );
    cm.lu().determinant()
}

pub fn k_term(r: &DistanceVector) -> f64 {
    k_raw(&r.0)
}

pub(crate) fn k_raw(r: &[f64; 6]) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = *r;
    r12 * r13 * r23 - r12 * r14 * r24 + r13 * r14 * r34 - r23 * r24 * r34
}

/// Cofactor of P in `½H = P·Q − K²`.
///
/// The middle bracket uses `r12² + r34²`; the product form `r12² r34²` is not
/// homogeneous and breaks the identity.
pub fn q_term(r: &DistanceVector) -> f64 {
    q_raw(&r.0)
}

pub(crate) fn q_raw(r: &[f64; 6]) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = *r;
    let [s12, s13, s14, s23, s24, s34] = r.map(|x| x * x);
    r12 * r34 * (-s12 - s34 + s23 + s14 + s13 + s24)
        + r14 * r23 * (s12 + s34 - s23 - s14 + s13 + s24)
        - r13 * r24 * (s12 + s34 + s23 + s14 - s13 - s24)
}

pub fn grad_u(r: &DistanceVector, m: &MassVector) -> [f64; 6] {
    let mm = m.pair_products();
    std::array::from_fn(|k| -mm[k] / (r.0[k] * r.0[k]))
}

/// Gradient of `M·I`, i.e. `m_i m_j r_ij`.
pub fn grad_mi(r: &DistanceVector, m: &MassVector) -> [f64; 6] {
    let mm = m.pair_products();
    std::array::from_fn(|k| mm[k] * r.0[k])
}

/// `(r34, −r24, r23, r14, −r13, r12)`.
pub fn grad_p(r: &DistanceVector) -> [f64; 6] {
    std::array::from_fn(|k| PTOLEMY_SIGN[k] * r.0[OPPOSITE[k]])
}

/// Tolerances for realizability and membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryTolerances {
    /// `H >= -eps_h · (max r)⁶` (H is homogeneous of degree 6).
    pub eps_h: f64,
    /// Every triangle inequality must hold with at least this margin.
    pub eps_tri: f64,
    /// Tolerance on `|I − 1|`, `|P|` and `|K|` for membership in D.
    pub d_tol: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        GeometryTolerances { eps_h: 1e-9, eps_tri: 1e-12, d_tol: 1e-8 }
    }
}

/// Smallest of the twelve strict triangle-inequality margins `r_ij + r_jk − r_ik`.
pub fn triangle_margin(r: &DistanceVector) -> f64 {
    let mut margin = f64::INFINITY;
    for skip in 0..4 {
        let b: Vec<usize> = (0..4).filter(|&x| x != skip).collect();
        let (x, y, z) = (r.get(b[0], b[1]), r.get(b[1], b[2]), r.get(b[0], b[2]));
        margin = margin.min(x + y - z).min(y + z - x).min(z + x - y);
    }
    margin
}

pub fn is_geometric(r: &DistanceVector, tol: &GeometryTolerances) -> bool {
    let scale = r.max();
    cayley_menger_h(r) >= -tol.eps_h * scale.powi(6) && triangle_margin(r) > tol.eps_tri
}

/// Membership in `D = M⁺ ∩ G`; `K = 0` stands in for `H = 0`.
pub fn in_d(r: &DistanceVector, m: &MassVector, tol: &GeometryTolerances) -> bool {
    (moment_i(r, m) - 1.0).abs() <= tol.d_tol
        && ptolemy_p(r).abs() <= tol.d_tol
        && k_term(r).abs() <= tol.d_tol
        && is_geometric(r, tol)
}
