//! Finite symmetric Fourier series of periodic functions on the unit
//! interval.
//!
//! Convention: `f_m = \int_0^1 f(t) e^{-2 pi i m t} dt`, so that
//! `f(t) = sum_m f_m e^{2 pi i m t}` and a real function has conjugate
//! symmetric coefficients `f_{-m} = conj(f_m)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A periodic function represented by its Fourier coefficients
/// `f_m` for `m = -mmax ..= mmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    mmax: i64,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    /// All-zero series with half-bandwidth `mmax`.
    pub fn zeros(mmax: i64) -> Self {
        assert!(mmax >= 0, "mmax must be nonnegative");
        Self {
            mmax,
            coeffs: vec![Complex64::new(0.0, 0.0); (2 * mmax + 1) as usize],
        }
    }

    /// Builds a series from coefficients ordered `m = -mmax ..= mmax`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "coefficient vector must have odd length (got {})",
                coeffs.len()
            )));
        }
        let mmax = (coeffs.len() as i64 - 1) / 2;
        Ok(Self { mmax, coeffs })
    }

    pub fn mmax(&self) -> i64 {
        self.mmax
    }

    /// The coefficient `f_m`; zero outside the stored bandwidth.
    pub fn get(&self, m: i64) -> Complex64 {
        if m.abs() > self.mmax {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + self.mmax) as usize]
        }
    }

    pub fn set(&mut self, m: i64, value: Complex64) {
        assert!(m.abs() <= self.mmax, "m = {m} outside bandwidth {}", self.mmax);
        self.coeffs[(m + self.mmax) as usize] = value;
    }

    /// Adds `value` to the coefficient at `m`.
    pub fn add(&mut self, m: i64, value: Complex64) {
        assert!(m.abs() <= self.mmax, "m = {m} outside bandwidth {}", self.mmax);
        self.coeffs[(m + self.mmax) as usize] += value;
    }

    /// Coefficients in order `m = -mmax ..= mmax`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterates `(m, f_m)` pairs in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - self.mmax, c))
    }

    /// Squared L2 norm by Parseval: `sum_m |f_m|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Energy carried by frequencies with `|m| > cutoff`.
    pub fn tail_energy(&self, cutoff: i64) -> f64 {
        self.iter()
            .filter(|(m, _)| m.abs() > cutoff)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Squared L2 distance to another series, treating missing coefficients
    /// as zero on either side.
    pub fn distance_sq(&self, other: &FourierSeries) -> f64 {
        let mmax = self.mmax.max(other.mmax);
        (-mmax..=mmax)
            .map(|m| (self.get(m) - other.get(m)).norm_sqr())
            .sum()
    }

    /// Copy truncated to `|m| <= mmax`.
    pub fn truncated(&self, mmax: i64) -> FourierSeries {
        let mut out = FourierSeries::zeros(mmax);
        for m in -mmax.min(self.mmax)..=mmax.min(self.mmax) {
            out.set(m, self.get(m));
        }
        out
    }

    /// Largest violation of conjugate symmetry `f_{-m} = conj(f_m)`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        (0..=self.mmax)
            .map(|m| (self.get(-m) - self.get(m).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Checks that the series represents a real function.
    pub fn require_real(&self, tol: f64) -> Result<()> {
        let asym = self.conjugate_asymmetry();
        if asym > tol {
            return Err(Error::Precondition(format!(
                "series is not conjugate symmetric (violation {asym:.3e} > {tol:.1e})"
            )));
        }
        Ok(())
    }

    /// Samples `f(i/n)` for `i = 0..n` by direct evaluation of the expansion
    /// `sum_m f_m e^{2 pi i m t}`.
    ///
    /// Requires `n >= 2*mmax + 1` so no coefficient aliases, and a real-valued
    /// result: the imaginary residue is checked against `tol_imag` and
    /// discarded.
    pub fn evaluate_on_grid(&self, n: usize, tol_imag: f64) -> Result<Vec<f64>> {
        let need = (2 * self.mmax + 1) as usize;
        if n < need {
            return Err(Error::Aliasing {
                n,
                mmax: self.mmax,
                need,
            });
        }
        let mut out = Vec::with_capacity(n);
        let mut worst_imag: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..n {
            let t = i as f64 / n as f64;
            // Powers of e^{2 pi i t} built by recurrence from m = -mmax.
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t);
            let mut pw = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * t * self.mmax as f64);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in &self.coeffs {
                acc += c * pw;
                pw *= w;
            }
            worst_imag = worst_imag.max(acc.im.abs());
            scale = scale.max(acc.re.abs());
            out.push(acc.re);
        }
        if worst_imag > tol_imag * scale.max(1.0) {
            return Err(Error::Precondition(format!(
                "grid evaluation has imaginary residue {worst_imag:.3e}, series is not real"
            )));
        }
        Ok(out)
    }
}
