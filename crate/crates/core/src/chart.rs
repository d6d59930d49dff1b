//! Coordinates on `M⁺ = {r > 0 : I = 1, P = 0}`.
//!
//! `p_ij = r_ij · (m_i m_j / 2M)^½` turns `I = 1` into the unit sphere in
//! `R⁶` and `P = 0` into the Plücker relation. The sums and differences
//!
//! ```text
//! v = (p12 + p34, p13 − p24, p14 + p23)
//! w = (p12 − p34, p13 + p24, p14 − p23)
//! ```
//!
//! split both constraints into `|v| = |w| = 1`, and positivity of every `p_ij`
//! becomes region E: `v1 >= |w1|`, `v3 >= |w3|`, `w2 >= 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceVector, MassVector, PAIR_NAMES};

/// Name of the generator behind [`sample_interior`], recorded in outputs.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.9)";

/// Draw budget of the rejection sampler.
pub const MAX_DRAWS: usize = 1_000_000;

/// Mass-weighted distances in storage order `(p12, p13, p14, p23, p24, p34)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PCoords(pub [f64; 6]);

impl PCoords {
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A point of `S² × S²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VWPoint {
    pub v: [f64; 3],
    pub w: [f64; 3],
}

fn norm3(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

impl VWPoint {
    /// Projects each triple back onto its unit sphere.
    pub fn renormalized(&self) -> VWPoint {
        let nv = norm3(&self.v);
        let nw = norm3(&self.w);
        VWPoint { v: self.v.map(|x| x / nv), w: self.w.map(|x| x / nw) }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.v[0], self.v[1], self.v[2], self.w[0], self.w[1], self.w[2]]
    }

    pub fn from_array(x: [f64; 6]) -> VWPoint {
        VWPoint { v: [x[0], x[1], x[2]], w: [x[3], x[4], x[5]] }
    }

    /// Image of the equal-mass unit square.
    pub fn square() -> VWPoint {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        VWPoint { v: [h, 0.0, h], w: [0.0, 1.0, 0.0] }
    }
}

fn pair_weights(m: &MassVector) -> [f64; 6] {
    let two_m = 2.0 * m.total();
    m.pair_products().map(|mm| (mm / two_m).sqrt())
}

pub fn r_to_p(r: &DistanceVector, m: &MassVector) -> PCoords {
    let w = pair_weights(m);
    PCoords(std::array::from_fn(|k| r.as_array()[k] * w[k]))
}

/// Inverse of [`r_to_p`]; the boundary of `M⁺` (some `p_ij <= 0`) is rejected.
pub fn p_to_r(p: &PCoords, m: &MassVector) -> Result<DistanceVector> {
    if let Some(k) = (0..6).find(|&k| !(p.0[k] > 0.0)) {
        return Err(Error::Boundary { pair: PAIR_NAMES[k], value: p.0[k] });
    }
    let w = pair_weights(m);
    DistanceVector::new(std::array::from_fn(|k| p.0[k] / w[k]))
}

pub fn p_to_vw(p: &PCoords) -> VWPoint {
    let [p12, p13, p14, p23, p24, p34] = p.0;
    VWPoint { v: [p12 + p34, p13 - p24, p14 + p23], w: [p12 - p34, p13 + p24, p14 - p23] }
}

/// Linear inverse of [`p_to_vw`] with no sign check.
pub fn vw_to_p_unchecked(x: &VWPoint) -> PCoords {
    let [v1, v2, v3] = x.v;
    let [w1, w2, w3] = x.w;
    PCoords([
        0.5 * (v1 + w1),
        0.5 * (v2 + w2),
        0.5 * (v3 + w3),
        0.5 * (v3 - w3),
        0.5 * (w2 - v2),
        0.5 * (v1 - w1),
    ])
}

/// Inverse of [`p_to_vw`]; fails if any reconstructed `p_ij < −tol`.
pub fn vw_to_p(x: &VWPoint, tol: f64) -> Result<PCoords> {
    let p = vw_to_p_unchecked(x);
    if let Some(k) = (0..6).find(|&k| p.0[k] < -tol) {
        return Err(Error::RegionViolation { pair: PAIR_NAMES[k], value: p.0[k] });
    }
    Ok(p)
}

pub fn in_region_e(x: &VWPoint) -> bool {
    x.v[0] >= x.w[0].abs() && x.v[2] >= x.w[2].abs() && x.w[1] >= 0.0
}

/// Distance vector of a chart point (via `p`).
pub fn vw_to_r(x: &VWPoint, m: &MassVector) -> Result<DistanceVector> {
    p_to_r(&vw_to_p_unchecked(x), m)
}

fn random_unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let g: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = norm3(&g);
        if n > 1e-8 {
            return g.map(|x| x / n);
        }
    }
}

/// Uniform draw on `S² × S²` conditioned on region E with every `p_ij > delta`.
pub fn sample_interior(seed: u64, delta: f64) -> Result<VWPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let x = VWPoint { v: random_unit3(&mut rng), w: random_unit3(&mut rng) };
        if in_region_e(&x) && vw_to_p_unchecked(&x).min() > delta {
            return Ok(x);
        }
    }
    Err(Error::SamplerExhausted(MAX_DRAWS))
}

/// Monte-Carlo fraction of `S² × S²` (uniform measure) lying in region E.
pub fn region_e_fraction(draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..draws)
        .filter(|_| {
            let x = VWPoint { v: random_unit3(&mut rng), w: random_unit3(&mut rng) };
            in_region_e(&x)
        })
        .count();
    hits as f64 / draws as f64
}
