//! Fourier-domain profiles of the band-limited scaling function and mother
//! wavelet.
//!
//! Everything downstream works with the magnitudes tabulated here; the
//! time-domain functions are never materialised outside of test oracles.
//! The auxiliary window is the degree-3-smooth polynomial
//! `nu(x) = x^4 (35 - 84x + 70x^2 - 20x^3)`, which satisfies
//! `nu(x) + nu(1-x) = 1` and has three vanishing derivatives at 0 and 1.

use std::f64::consts::PI;

/// Lower edge of the mother-wavelet support, `2*pi/3`.
pub const WAVELET_SUPPORT_LO: f64 = 2.0 * PI / 3.0;
/// Upper edge of the mother-wavelet support, `8*pi/3`.
pub const WAVELET_SUPPORT_HI: f64 = 8.0 * PI / 3.0;
/// Upper edge of the scaling-function support, `4*pi/3`.
pub const SCALING_SUPPORT_HI: f64 = 4.0 * PI / 3.0;

/// C^3 auxiliary window on [0, 1], clamped outside.
pub fn aux_window(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let x2 = x * x;
        x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x)
    }
}

/// Magnitude of the scaling-function Fourier transform at `omega` (even in
/// `omega`). Equals 1 on `|omega| <= 2*pi/3`, tapers to 0 at `4*pi/3`.
pub fn scaling_profile(omega: f64) -> f64 {
    let w = omega.abs();
    if w <= WAVELET_SUPPORT_LO {
        1.0
    } else if w < SCALING_SUPPORT_HI {
        (0.5 * PI * aux_window(1.5 * w / PI - 1.0)).cos()
    } else {
        0.0
    }
}

/// Magnitude of the mother-wavelet Fourier transform at `omega` (even in
/// `omega`). Supported on `2*pi/3 < |omega| < 8*pi/3`; zero at both edges.
pub fn wavelet_profile(omega: f64) -> f64 {
    let w = omega.abs();
    if w <= WAVELET_SUPPORT_LO || w >= WAVELET_SUPPORT_HI {
        0.0
    } else if w <= SCALING_SUPPORT_HI {
        (0.5 * PI * aux_window(1.5 * w / PI - 1.0)).sin()
    } else {
        (0.5 * PI * aux_window(0.75 * w / PI - 1.0)).cos()
    }
}
