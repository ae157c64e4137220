//! Observation models and the Fourier-domain statistics `fhat_m`.
//!
//! Two routes produce the same sufficient statistic:
//!
//! - **Continuous model.** White noise over `(u, t)` reduces, after weighted
//!   least squares across the channel variable, to independent coefficient
//!   observations `fhat_m = f_m + n^{-1/2} tau_1(m)^{-1/2} xi_m` with complex
//!   standard Gaussian `xi_m` (`xi_{-m} = conj(xi_m)`, `xi_0` real). The
//!   simulator draws this exact distribution in the coefficient domain.
//! - **Discrete model.** `y(u_l, t_i) = h(u_l, t_i) + eps_{li}` on the grid
//!   `t_i = i/N` with i.i.d. standard Gaussian noise, simulated in the time
//!   domain. Row-wise DFTs `y_m(u_l) = N^{-1} sum_i y(u_l, t_i)
//!   e^{-2 pi i m t_i}` then satisfy `y_m(u_l) = g_m(u_l) f_m + N^{-1/2}
//!   z_{ml}` and are pooled across channels by weighted least squares.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::kernels::ConvolutionKernel;
use crate::rng::{channel_rng, coefficient_rng, RngSpec};

pub use crate::rng::RngSpec as Seed;

/// The sufficient statistic of one continuous-model observation.
#[derive(Debug, Clone)]
pub struct ContinuousObservation {
    pub fhat: FourierSeries,
    /// Noise-scale parameter of the model (nominal sample size).
    pub n: f64,
    pub kernel_name: String,
    pub seed: RngSpec,
}

impl ContinuousObservation {
    /// The estimators of `f_m` (already formed for this model).
    pub fn estimate_fm(&self) -> FourierSeries {
        self.fhat.clone()
    }
}

/// Time-domain samples of one discrete-model observation.
#[derive(Debug, Clone)]
pub struct DiscreteObservation {
    /// `samples[l][i] = y(u_l, t_i)`, `t_i = i/N`.
    pub samples: Vec<Vec<f64>>,
    pub points: Vec<f64>,
    pub kernel_name: String,
    pub seed: RngSpec,
}

impl DiscreteObservation {
    pub fn channels(&self) -> usize {
        self.samples.len()
    }

    pub fn grid_len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Total sample count `n = N * M`.
    pub fn n(&self) -> f64 {
        (self.channels() * self.grid_len()) as f64
    }

    /// Row-wise discrete Fourier coefficient
    /// `y_m(u_l) = N^{-1} sum_i y(u_l, t_i) e^{-2 pi i m t_i}`.
    pub fn row_dft(&self, l: usize, m: i64) -> Complex64 {
        let row = &self.samples[l];
        let n = row.len();
        let step = -2.0 * PI * m as f64 / n as f64;
        let rot = Complex64::from_polar(1.0, step);
        let mut ph = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &y) in row.iter().enumerate() {
            acc += y * ph;
            ph *= rot;
            if i % 256 == 255 {
                ph = Complex64::from_polar(1.0, step * (i + 1) as f64);
            }
        }
        acc / n as f64
    }

    /// Weighted-least-squares estimators of `f_m` for `|m| <= mmax`:
    /// `fhat_m = sum_l conj(g_m(u_l)) y_m(u_l) / sum_l |g_m(u_l)|^2`.
    pub fn estimate_fm(&self, kernel: &ConvolutionKernel, mmax: i64) -> Result<FourierSeries> {
        let n_grid = self.grid_len();
        let need = (2 * mmax + 1) as usize;
        if n_grid < need {
            return Err(Error::Aliasing {
                n: n_grid,
                mmax,
                need,
            });
        }
        let mut fhat = FourierSeries::zeros(mmax);
        for m in 0..=mmax {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for l in 0..self.channels() {
                let g = kernel.g_channel(l, m)?;
                num += g.conj() * self.row_dft(l, m);
                den += g.norm_sqr();
            }
            if den == 0.0 {
                return Err(Error::IllPosed { m });
            }
            let v = num / den;
            fhat.set(m, v);
            if m > 0 {
                fhat.set(-m, v.conj());
            }
        }
        Ok(fhat)
    }
}

/// Draws the continuous-model statistic under the true `f`.
///
/// `noise_scale` multiplies the noise standard deviation; 1 is the model,
/// 0 gives the noiseless limit.
pub fn simulate_continuous_scaled(
    f: &FourierSeries,
    kernel: &ConvolutionKernel,
    n: f64,
    seed: RngSpec,
    noise_scale: f64,
) -> Result<ContinuousObservation> {
    if n.is_nan() || n <= 0.0 {
        return Err(Error::Parameter(format!("sample size n = {n} must be > 0")));
    }
    let mmax = f.mmax();
    let mut fhat = FourierSeries::zeros(mmax);
    for m in 0..=mmax {
        let sd = if noise_scale == 0.0 {
            0.0
        } else {
            let tau1 = kernel.tau(1, m)?;
            if tau1 <= 0.0 {
                return Err(Error::IllPosed { m });
            }
            noise_scale / (n * tau1).sqrt()
        };
        let mut rng = coefficient_rng(seed, m);
        if m == 0 {
            let xi: f64 = rng.sample(StandardNormal);
            fhat.set(0, f.get(0) + Complex64::new(sd * xi, 0.0));
        } else {
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            let xi = Complex64::new(re, im) / 2f64.sqrt();
            let v = f.get(m) + sd * xi;
            fhat.set(m, v);
            fhat.set(-m, f.get(-m) + sd * xi.conj());
        }
    }
    Ok(ContinuousObservation {
        fhat,
        n,
        kernel_name: kernel.name().to_string(),
        seed,
    })
}

/// Continuous-model observation with the model's noise level.
pub fn simulate_continuous(
    f: &FourierSeries,
    kernel: &ConvolutionKernel,
    n: f64,
    seed: RngSpec,
) -> Result<ContinuousObservation> {
    simulate_continuous_scaled(f, kernel, n, seed, 1.0)
}

/// Simulates the discrete model on the grid `t_i = i/N` with `noise_std`
/// times standard Gaussian noise (1 is the model). The kernel design must be
/// discrete; `n = N * M`.
pub fn simulate_discrete_scaled(
    f: &FourierSeries,
    kernel: &ConvolutionKernel,
    grid_len: usize,
    seed: RngSpec,
    noise_std: f64,
) -> Result<DiscreteObservation> {
    let crate::kernels::SamplingDesign::Discrete { points } = kernel.design() else {
        return Err(Error::Parameter(
            "discrete simulation requires a kernel with a discrete design".into(),
        ));
    };
    let need = (2 * f.mmax() + 1) as usize;
    if grid_len < need {
        return Err(Error::Aliasing {
            n: grid_len,
            mmax: f.mmax(),
            need,
        });
    }
    let mut samples = Vec::with_capacity(points.len());
    for l in 0..points.len() {
        // noiseless row: Fourier series with coefficients g_m(u_l) f_m
        let mut hl = FourierSeries::zeros(f.mmax());
        for (m, fm) in f.iter() {
            hl.set(m, kernel.g_channel(l, m)? * fm);
        }
        let mut row = hl.evaluate_on_grid(grid_len, 1e-9)?;
        if noise_std != 0.0 {
            let mut rng = channel_rng(seed, l);
            for y in row.iter_mut() {
                let eps: f64 = rng.sample(StandardNormal);
                *y += noise_std * eps;
            }
        }
        samples.push(row);
    }
    Ok(DiscreteObservation {
        samples,
        points: points.clone(),
        kernel_name: kernel.name().to_string(),
        seed,
    })
}

/// Discrete-model observation with unit noise.
pub fn simulate_discrete(
    f: &FourierSeries,
    kernel: &ConvolutionKernel,
    grid_len: usize,
    seed: RngSpec,
) -> Result<DiscreteObservation> {
    simulate_discrete_scaled(f, kernel, grid_len, seed, 1.0)
}
