//! Monte Carlo photon random walk in the half-space `z > 0`.
//!
//! A pencil beam enters at the origin along `+z`. Free paths are exponential
//! in units of `1 / mu_t`, absorption is carried as a weight (implicit
//! capture) and directions follow the full Henyey-Greenstein law. The
//! boundary is a vacuum: a photon crossing `z = 0` leaves for good and its
//! exit point is recorded. Structured-illumination exitance is the Fourier
//! transform of those exit points.
//!
//! Every photon draws from its own ChaCha stream, so the records do not
//! depend on how the work is split across threads.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::extended::Dd;
use crate::spectrum::OpticalMedium;

/// Photons whose weight falls below this play Russian roulette.
const ROULETTE_WEIGHT: f64 = 1e-3;
const ROULETTE_SURVIVAL: f64 = 0.1;

/// A photon leaving through `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRecord {
    /// Exit position on the boundary, in `1 / mu_t`.
    pub x: f64,
    pub y: f64,
    /// Direction cosine with `+z` at exit; always negative.
    pub mu: f64,
    pub weight: f64,
}

/// Runs `n_photons` histories and returns the exits in photon order.
pub fn simulate(medium: &OpticalMedium, n_photons: usize, seed: u64) -> Vec<PhotonRecord> {
    let albedo = medium.albedo();
    let g = medium.g();
    (0..n_photons as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            trace(&mut rng, albedo, g)
        })
        .collect()
}

fn trace(rng: &mut ChaCha8Rng, albedo: f64, g: f64) -> Option<PhotonRecord> {
    let mut pos = [0.0f64; 3];
    let mut dir = [0.0, 0.0, 1.0];
    let mut weight = 1.0;
    loop {
        let s = -(1.0 - rng.random::<f64>()).ln();
        let z = pos[2] + s * dir[2];
        if z <= 0.0 {
            let t = -pos[2] / dir[2];
            return Some(PhotonRecord { x: pos[0] + t * dir[0], y: pos[1] + t * dir[1], mu: dir[2], weight });
        }
        pos = [pos[0] + s * dir[0], pos[1] + s * dir[1], z];
        weight *= albedo;
        if weight < ROULETTE_WEIGHT {
            if rng.random::<f64>() >= ROULETTE_SURVIVAL {
                return None;
            }
            weight /= ROULETTE_SURVIVAL;
        }
        let cos_t = sample_hg(g, rng.random());
        let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        dir = turn(dir, cos_t, phi);
    }
}

/// Inverse-CDF Henyey-Greenstein cosine for a uniform `xi` in `[0, 1)`.
pub fn sample_hg(g: f64, xi: f64) -> f64 {
    if g.abs() < 1e-8 {
        return 2.0 * xi - 1.0;
    }
    let t = (1.0 - g * g) / (1.0 - g + 2.0 * g * xi);
    ((1.0 + g * g - t * t) / (2.0 * g)).clamp(-1.0, 1.0)
}

/// Deflects the unit vector `d` by polar angle `acos(cos_t)` and azimuth `phi`.
fn turn(d: [f64; 3], cos_t: f64, phi: f64) -> [f64; 3] {
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    let [ux, uy, uz] = d;
    let out = if uz.abs() > 0.99999 {
        [sin_t * cp, sin_t * sp, uz.signum() * cos_t]
    } else {
        let r = (1.0 - uz * uz).sqrt();
        [
            sin_t * (ux * uz * cp - uy * sp) / r + ux * cos_t,
            sin_t * (uy * uz * cp + ux * sp) / r + uy * cos_t,
            -sin_t * cp * r + uz * cos_t,
        ]
    };
    let n = (out[0] * out[0] + out[1] * out[1] + out[2] * out[2]).sqrt();
    [out[0] / n, out[1] / n, out[2] / n]
}

/// Monte Carlo estimate of `J_+` with its delete-one jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McFlux {
    pub j: f64,
    /// Infinite when no photon came back.
    pub stderr: f64,
}

/// `J_+(q0) = |sum_i w_i exp(i q0 x_i)| / n_photons`, `q0` in internal units
/// along `x`.
pub fn flux_fourier(records: &[PhotonRecord], q0: f64, n_photons: usize) -> McFlux {
    if records.is_empty() || n_photons < 2 {
        return McFlux { j: 0.0, stderr: f64::INFINITY };
    }
    let phased = |r: &PhotonRecord| Complex64::from_polar(r.weight, q0 * r.x);
    let (mut re, mut im) = (Dd::zero(), Dd::zero());
    for z in records.iter().map(phased) {
        re += Dd::from(z.re);
        im += Dd::from(z.im);
    }
    let s = Complex64::new(f64::from(re), f64::from(im));
    let abs_s = s.norm();
    let n = n_photons as f64;
    // leaving photon i out changes |S| by d_i; photons that never exit leave d = 0
    let shift = |z: Complex64| {
        let sz = s - z;
        (z.norm_sqr() - 2.0 * (s.conj() * z).re) / (sz.norm() + abs_s)
    };
    let (mut sum_d, mut sum_d2) = (Dd::zero(), Dd::zero());
    for d in records.iter().map(|r| shift(phased(r))) {
        sum_d += Dd::from(d);
        sum_d2 += Dd::from(d * d);
    }
    let mean_d = f64::from(sum_d) / n;
    let var_d = (f64::from(sum_d2) / n - mean_d * mean_d).max(0.0);
    // J_(i) = (|S| + d_i) / (n - 1)
    let stderr = ((n - 1.0) * var_d).sqrt() / (n - 1.0);
    McFlux { j: abs_s / n, stderr }
}
