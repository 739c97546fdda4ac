//! Estimation of the characteristic exponent of stable laws.
//!
//! The crate is organised around the estimation pipeline:
//!
//! - [`params`]: form-A `(alpha, beta, gamma, lambda)` and strictly-stable
//!   `(nu, theta, tau)` parameterizations and the maps between them.
//! - [`sampler`]: seeded stable variate generation (Chambers–Mallows–Stuck).
//! - [`estimator`]: sign/log-magnitude statistics, the strictly-stable
//!   estimator, the triplet transform and back-conversion for general laws.
//! - [`moments`]: closed-form moments of `sign X` and `log |X|`.
//! - [`bounds`]: the mean-square deviation bound for the exponent estimate.
//! - [`signal`]: extrema-increment analysis of sampled time series and
//!   stable densities by characteristic-function inversion.
//! - [`study`]: seeded Monte Carlo studies and oracle comparisons.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod moments;
pub mod params;
pub mod quad;
pub mod sampler;
pub mod signal;
pub mod stats;
pub mod study;

pub use error::{Error, Result};
pub use params::{FormAParams, StrictParams};
