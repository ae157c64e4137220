//! Dense-quadrature oracle for the basis Fourier coefficients.
//!
//! The library computes `psi_{mjk}` and `phi_{mjk}` from closed-form band
//! windows and phase algebra. This oracle takes the long way round: it
//! materialises the time-domain mother wavelet and scaling function by
//! numerically inverting their Fourier transforms on a huge grid, builds the
//! periodized basis function by summing translates, and integrates
//! `int_0^1 psi_jk(t) e^{-2 pi i m t} dt` by the periodic trapezoid rule
//! (exact for band-limited integrands). Only the window profiles are shared
//! with the implementation; no band or phase formula is reused.

use num_complex::Complex64;
use std::f64::consts::PI;

use fundeconv::window::{scaling_profile, wavelet_profile};
use fundeconv::MeyerBasis;

// In-place radix-2 FFT with sign +1 in the exponent (inverse-DFT kernel,
// no normalisation).
fn fft_plus(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two());
    // bit reversal
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = 2.0 * PI / len as f64;
        let wlen = Complex64::from_polar(1.0, ang);
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[i + k];
                let v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Samples of a band-limited function on the grid `x = p * hx`,
/// `p = -n/2 .. n/2`, from its Fourier transform `fhat` (supported within
/// the grid's Nyquist range). Index into the result with `p + n/2`.
fn time_domain_samples(fhat: impl Fn(f64) -> Complex64, n: usize, hx: f64) -> Vec<f64> {
    let period = n as f64 * hx;
    let d_omega = 2.0 * PI / period;
    let mut data = vec![Complex64::new(0.0, 0.0); n];
    for (q, slot) in data.iter_mut().enumerate() {
        // signed frequency index
        let qs = if q < n / 2 { q as i64 } else { q as i64 - n as i64 };
        let omega = qs as f64 * d_omega;
        *slot = fhat(omega) * d_omega / (2.0 * PI);
    }
    fft_plus(&mut data);
    // data[p mod n] now holds f(p * hx); recentre and check realness
    let mut out = vec![0.0; n + 1];
    for p in -(n as i64) / 2..=(n as i64) / 2 {
        let idx = p.rem_euclid(n as i64) as usize;
        assert!(data[idx].im.abs() < 1e-9, "time samples are not real");
        out[(p + n as i64 / 2) as usize] = data[idx].re;
    }
    out
}

struct TimeTable {
    values: Vec<f64>,
    hx: f64,
    half: i64,
}

impl TimeTable {
    fn get(&self, p: i64) -> f64 {
        if p.abs() > self.half {
            0.0 // beyond the tabulated window the tails are negligible
        } else {
            self.values[(p + self.half) as usize]
        }
    }
}

// Mother wavelet psi*(x) on the eighth-integer grid: Fourier transform
// e^{-i omega / 2} b(|omega|).
fn tabulate_mother_wavelet() -> TimeTable {
    let n = 1 << 19;
    let hx = 0.125;
    let values = time_domain_samples(
        |omega| Complex64::from_polar(1.0, -omega / 2.0) * wavelet_profile(omega),
        n,
        hx,
    );
    TimeTable {
        values,
        hx,
        half: (n as i64) / 2,
    }
}

// Scaling function phi*(x): Fourier transform A(|omega|), real and even.
fn tabulate_scaling_function() -> TimeTable {
    let n = 1 << 19;
    let hx = 0.125;
    let values = time_domain_samples(|omega| Complex64::new(scaling_profile(omega), 0.0), n, hx);
    TimeTable {
        values,
        hx,
        half: (n as i64) / 2,
    }
}

/// Periodized basis function `2^{j/2} sum_i f*(2^j (t + i) - k)` sampled on
/// `t = i/n_t` for grid points that land exactly on the table's x-grid.
fn periodized_samples(table: &TimeTable, j: u32, k: u32, n_t: usize, images: i64) -> Vec<f64> {
    let scale = 1i64 << j;
    // 2^j / n_t must be a multiple of the table step so every argument is a
    // table hit
    let step_ratio = scale as f64 / (n_t as f64 * table.hx);
    assert!(
        (step_ratio - step_ratio.round()).abs() < 1e-12 && step_ratio >= 1.0,
        "t-grid does not align with the x-table"
    );
    let per_t = step_ratio.round() as i64;
    let amp = (scale as f64).sqrt();
    (0..n_t)
        .map(|i| {
            let base = i as i64 * per_t - k as i64 * (1.0 / table.hx).round() as i64;
            let image_stride = scale * (1.0 / table.hx).round() as i64;
            let mut acc = 0.0;
            for img in -images..=images {
                acc += table.get(base + img * image_stride);
            }
            amp * acc
        })
        .collect()
}

/// `int_0^1 f(t) e^{-2 pi i m t} dt` by the periodic trapezoid rule.
fn fourier_coeff(samples: &[f64], m: i64) -> Complex64 {
    let n = samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in samples.iter().enumerate() {
        let theta = -2.0 * PI * m as f64 * i as f64 / n as f64;
        acc += v * Complex64::from_polar(1.0, theta);
    }
    acc / n as f64
}

#[test]
fn wavelet_coefficients_match_the_dense_quadrature_oracle() {
    let table = tabulate_mother_wavelet();
    let basis = MeyerBasis::new(6);
    let j = 5u32;
    let n_t = 256usize;
    for k in [7u32, 0, 31] {
        let samples = periodized_samples(&table, j, k, n_t, 900);
        for m in [20i64, 11, 35, -17, 42, 3] {
            let oracle = fourier_coeff(&samples, m);
            let implemented = basis.wavelet_fourier_coeff(j, k, m).unwrap();
            let diff = (oracle - implemented).norm();
            assert!(
                diff < 1e-8,
                "psi_(m={m}, j={j}, k={k}): oracle {oracle}, implemented {implemented}, diff {diff:.2e}"
            );
        }
        // magnitude bound at the probed position
        let v = basis.wavelet_fourier_coeff(j, k, 20).unwrap();
        assert!(v.norm() <= 2f64.powf(-(j as f64) / 2.0) + 1e-15);
    }
}

#[test]
fn scaling_coefficients_match_the_dense_quadrature_oracle() {
    let table = tabulate_scaling_function();
    let basis = MeyerBasis::new(6);
    let j0 = 4u32;
    let n_t = 128usize;
    for k in [5u32, 0, 15] {
        let samples = periodized_samples(&table, j0, k, n_t, 900);
        for m in [3i64, 0, -8, 10, 5] {
            let oracle = fourier_coeff(&samples, m);
            let implemented = basis.scaling_fourier_coeff(j0, k, m).unwrap();
            let diff = (oracle - implemented).norm();
            assert!(
                diff < 1e-8,
                "phi_(m={m}, j0={j0}, k={k}): oracle {oracle}, implemented {implemented}, diff {diff:.2e}"
            );
        }
    }
}

#[test]
fn band_membership_matches_the_window_oracle() {
    // enumerate m and test nonzero wavelet_profile(2 pi m / 2^j) directly
    let basis = MeyerBasis::new(4);
    for j in [0u32, 3] {
        let band = basis.band(j);
        for m in -64i64..=64 {
            let window = wavelet_profile(2.0 * PI * m as f64 / (1i64 << j) as f64);
            assert_eq!(
                window > 0.0,
                band.contains(m),
                "j={j}, m={m}: window {window}, band {:?}",
                (band.lo(), band.hi())
            );
        }
    }
    // frozen cases: C_0 = {-1, 1}, C_3 = {3..10}
    assert_eq!(basis.band(0).iter().collect::<Vec<_>>(), vec![-1, 1]);
    assert_eq!(
        basis.band(3).iter().filter(|&m| m > 0).collect::<Vec<_>>(),
        (3..=10).collect::<Vec<_>>()
    );
}
