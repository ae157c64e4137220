//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by basis construction, kernels, simulation and estimation.
#[derive(Debug, Error)]
pub enum Error {
    /// A resolution level beyond the tabulated capacity of a basis was requested.
    #[error("level {requested} exceeds basis capacity j_max = {capacity}")]
    Capacity { requested: u32, capacity: u32 },

    /// A Fourier series does not cover every frequency band an operation needs.
    #[error(
        "insufficient bandwidth: series carries |m| <= {have} but levels j0={j0}, J={j_upper} \
         require mmax >= {need}"
    )]
    Bandwidth {
        have: i64,
        need: i64,
        j0: u32,
        j_upper: u32,
    },

    /// A sampling grid is too coarse to represent a series without aliasing.
    #[error("aliasing: {n} grid points cannot represent a series with mmax = {mmax}; need n >= {need}")]
    Aliasing { n: usize, mmax: i64, need: usize },

    /// The kernel energy vanishes at some frequency, so that frequency cannot
    /// be recovered from the data.
    #[error("ill-posed kernel: tau_1({m}) = 0, frequency {m} is not recoverable")]
    IllPosed { m: i64 },

    /// A parameter lies outside its admissible domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A quadrature or other numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The requested threshold regime is incompatible with the kernel decay.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// Smoothness parameters violate a theorem hypothesis.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A documented operation precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
