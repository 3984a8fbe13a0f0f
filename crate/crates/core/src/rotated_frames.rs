//! Complex plane-wave directions `k(nu, q) = (i nu q_x, i nu q_y, k_z)` and
//! the angle bookkeeping used to rotate spherical harmonics onto them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_functions::gauss_legendre;
use crate::spectrum::{GKernel, OpticalMedium};

/// `k_z(x) = sqrt(1 + x^2)`.
pub fn khat_z(x: f64) -> f64 {
    x.hypot(1.0)
}

/// Frame of the complex unit vector attached to one `(nu, q)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveFrame {
    pub nu: f64,
    pub q_vec: [f64; 2],
    /// `|nu q|`, the argument of the continued Wigner table.
    pub x: f64,
    pub k_z: f64,
    pub phi_q: f64,
    pub phi_k: f64,
}

impl PlaneWaveFrame {
    pub fn new(nu: f64, q_vec: [f64; 2]) -> Result<Self> {
        let (x, phi_k) = frame_angles(nu, q_vec)?;
        let q = q_vec[0].hypot(q_vec[1]);
        let phi_q = if q == 0.0 { 0.0 } else { q_vec[1].atan2(q_vec[0]) };
        Ok(PlaneWaveFrame { nu, q_vec, x, k_z: khat_z(x), phi_q, phi_k })
    }

    pub fn q(&self) -> f64 {
        self.q_vec[0].hypot(self.q_vec[1])
    }

    /// Cartesian components `(i nu q_x, i nu q_y, k_z)`.
    pub fn k_hat(&self) -> [Complex64; 3] {
        [
            Complex64::new(0.0, self.nu * self.q_vec[0]),
            Complex64::new(0.0, self.nu * self.q_vec[1]),
            Complex64::new(self.k_z, 0.0),
        ]
    }

    /// `cos(theta_k) = k_z`, `sin(theta_k) = i |nu q|`.
    pub fn cos_sin_theta(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.k_z, 0.0), Complex64::new(0.0, self.x))
    }
}

/// Wigner argument `|nu q|` and the azimuth of `k`: `phi_q` for `nu > 0`,
/// `phi_q + pi` for `nu < 0`. At `q = 0` the frame is the identity and both
/// are zero.
pub fn frame_angles(nu: f64, q_vec: [f64; 2]) -> Result<(f64, f64)> {
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::domain(format!("plane-wave frame needs a finite nonzero nu, got {nu}")));
    }
    let q = q_vec[0].hypot(q_vec[1]);
    if q == 0.0 {
        return Ok((0.0, 0.0));
    }
    let phi_q = q_vec[1].atan2(q_vec[0]);
    let phi_k = if nu > 0.0 { phi_q } else { phi_q + PI };
    Ok(((nu * q).abs(), phi_k))
}

/// Direction cosine of `s = (mu, phi)` rotated into the frame of `k(-xi, q)`:
/// `k_z(xi q) mu - i xi q sqrt(1-mu^2) cos(phi - phi_q)`.
pub fn rotated_mu(xi: f64, q: f64, phi_q: f64, mu: f64, phi: f64) -> Complex64 {
    let x = xi * q;
    Complex64::new(khat_z(x) * mu, -x * (1.0 - mu * mu).max(0.0).sqrt() * (phi - phi_q).cos())
}

/// Rows `e'_x, e'_y, e'_z` of the complex rotation onto `k(nu, q x)`, with
/// `e'_z = k`. Orthogonal under the bilinear (not Hermitian) product.
pub fn frame_rows(nu: f64, q: f64) -> [[Complex64; 3]; 3] {
    let x = nu * q;
    let k = Complex64::new(khat_z(x), 0.0);
    let ix = Complex64::new(0.0, x);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [[k, zero, -ix], [zero, one, zero], [ix, zero, k]]
}

/// One discrete mode `(m, nu)` of a medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteMode {
    pub m: i64,
    pub nu: f64,
}

/// Full-range inner product `int mu (R Phi_{nu1}^{m1})(R Phi_{nu2}^{m2*}) ds`
/// over the sphere, both modes rotated onto their own `k(nu, q x)`.
///
/// The integral is taken in the rotated variables of the mode with the
/// smaller eigenvalue. There neither factor has a pole on the real sphere,
/// whereas in the original variables the poles `nu = k . s` lie on it once
/// `q` is of order one. `n_mu` Gauss nodes are used per panel of `mu'`;
/// panels are graded geometrically towards `mu' = 1` down to a tenth of the
/// smaller `nu - 1`.
pub fn full_range_inner_product(
    medium: &OpticalMedium,
    a: DiscreteMode,
    b: DiscreteMode,
    q: f64,
    n_mu: usize,
    n_phi: usize,
) -> Result<Complex64> {
    for mode in [a, b] {
        if !(mode.nu > 1.0) {
            return Err(Error::domain(format!("discrete modes need nu > 1, got {}", mode.nu)));
        }
    }
    let reference = if a.nu <= b.nu { a } else { b };
    let back = frame_rows(reference.nu, q);
    // rows of M_i M_ref^T, mapping s' to the rotated components of mode i
    let compose = |mode: DiscreteMode| {
        let rows = frame_rows(mode.nu, q);
        let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = (0..3).map(|t| rows[r][t] * back[c][t]).sum();
            }
        }
        out
    };
    let (ma, mb) = (compose(a), compose(b));
    let (ka, kb) = (GKernel::discrete(a.m, a.nu, medium)?, GKernel::discrete(b.m, b.nu, medium)?);
    let albedo = medium.albedo();
    let mode_value = |mode: DiscreteMode, kernel: &GKernel, rows: &[[Complex64; 3]; 3], s: [f64; 3], conj: bool| {
        let u: Vec<Complex64> = rows.iter().map(|r| r[0] * s[0] + r[1] * s[1] + r[2] * s[2]).collect();
        let i = Complex64::i();
        let transverse = if conj { u[0] - i * u[1] } else { u[0] + i * u[1] };
        0.5 * albedo * mode.nu * kernel.eval(u[2], medium) / (mode.nu - u[2]) * transverse.powu(mode.m.unsigned_abs() as u32)
    };

    let mut panels = vec![(-1.0, 0.0)];
    let floor = 0.1 * (reference.nu - 1.0);
    let mut lo = 0.0;
    let mut width = 0.5;
    while width > floor {
        panels.push((lo, lo + width));
        lo += width;
        width *= 0.5;
    }
    panels.push((lo, 1.0));
    let base = gauss_legendre(n_mu)?;
    let h = 2.0 * PI / n_phi as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (p0, p1) in panels {
        let rule = base.mapped(p0, p1);
        for (&mu, &w) in rule.nodes.iter().zip(&rule.weights) {
            let sin = (1.0 - mu * mu).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = j as f64 * h;
                let s = [sin * phi.cos(), sin * phi.sin(), mu];
                // original polar cosine s_z = sum_r M_ref[r][z] s'_r
                let mu_orig: Complex64 = (0..3).map(|r| back[r][2] * s[r]).sum();
                let fa = mode_value(a, &ka, &ma, s, false);
                let fb = mode_value(b, &kb, &mb, s, true);
                total += w * h * mu_orig * fa * fb;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn khat_values() {
        assert_eq!(khat_z(0.0), 1.0);
        assert!((khat_z(1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(khat_z(-3.0), khat_z(3.0));
    }

    #[test]
    fn frame_angle_cases() {
        assert_eq!(frame_angles(0.5, [2.0, 0.0]).unwrap(), (1.0, 0.0));
        let (x, phi) = frame_angles(-0.5, [2.0, 0.0]).unwrap();
        assert_eq!(x, 1.0);
        assert!((phi - PI).abs() < 1e-15);
        assert_eq!(frame_angles(0.5, [0.0, 0.0]).unwrap(), (0.0, 0.0));
        assert!(frame_angles(0.0, [1.0, 0.0]).is_err());
    }

    #[test]
    fn rotated_mu_edges() {
        assert_eq!(rotated_mu(0.7, 0.0, 0.0, 0.3, 1.1), Complex64::new(0.3, 0.0));
        let k = khat_z(1.4);
        assert!((rotated_mu(0.7, 2.0, 0.3, 1.0, 2.0) - k).norm() < 1e-15);
        assert!((rotated_mu(0.7, 2.0, 0.3, -1.0, 2.0) + k).norm() < 1e-15);
        assert_eq!(rotated_mu(0.7, 2.0, 0.3, 0.4, 2.0).re, k * 0.4);
    }
}
