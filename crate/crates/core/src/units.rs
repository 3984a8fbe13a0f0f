//! Conversion between spatial frequencies per transport mean free path and
//! the internal units, where lengths are measured in `1 / mu_t`.

use crate::spectrum::OpticalMedium;

/// `q0 [1/ell*]` to internal units: `q0 (mu_t - mu_s g) / mu_t`.
pub fn convert_units(q0_per_ellstar: f64, medium: &OpticalMedium) -> f64 {
    q0_per_ellstar * (medium.mu_t() - medium.mu_s() * medium.g()) / medium.mu_t()
}

/// Inverse of [`convert_units`].
pub fn to_per_ellstar(q0_internal: f64, medium: &OpticalMedium) -> f64 {
    q0_internal * medium.mu_t() / (medium.mu_t() - medium.mu_s() * medium.g())
}
