//! Functional deconvolution in a periodic setting.
//!
//! Recovers a periodic signal `f` on `[0,1]` from noisy convolutions
//! `y(u, t) = (f * g(u, .))(t) + noise`, observed either continuously over a
//! band of channels `u` or at finitely many channels. The estimator works in
//! the Fourier domain: per-frequency weighted least squares across channels,
//! projection onto a band-limited wavelet basis, and block thresholding of
//! the wavelet coefficients.
//!
//! Modules:
//! - [`window`], [`fourier`], [`meyer`] — the band-limited basis machinery
//! - [`kernels`] — the catalogue of blurring kernels and their energy
//!   statistics
//! - [`model`] — observation simulators for the continuous and discrete
//!   models
//! - [`estimator`] — tuning plans, block thresholding, smoothness norms
//! - [`risk`] — test functions, rate predictions, Monte Carlo risk curves
//! - [`config`], [`io`] — experiment configuration and file formats

pub mod config;
pub mod error;
pub mod estimator;
pub mod fourier;
pub mod io;
pub mod kernels;
pub mod meyer;
pub mod model;
pub mod quad;
pub mod risk;
pub mod rng;
pub mod window;

pub use error::{Error, Result};
pub use fourier::FourierSeries;
pub use meyer::{BandIndexSet, MeyerBasis, WaveletDecomposition};
