//! Three-dimensional F_N solver for the radiative transport equation in the
//! half-space under structured illumination, with two independent
//! cross-checks: the method of rotated reference frames and a Monte Carlo
//! photon random walk.
//!
//! Lengths are normalized by the total attenuation `mu_t` throughout; the
//! [`units`] helpers convert spatial frequencies given per transport mean
//! free path.

pub mod dd;
pub mod error;
pub mod extended;
pub mod fn_solver;
pub mod mc_oracle;
pub mod mrrf_solver;
pub mod special_functions;
pub mod rotated_frames;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
