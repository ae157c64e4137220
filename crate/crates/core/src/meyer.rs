//! Periodized Meyer wavelet basis, entirely in the Fourier domain.
//!
//! With the series convention of [`crate::fourier`], the basis functions have
//! Fourier coefficients
//!
//! ```text
//! psi_{mjk} = 2^{-j/2} b(2 pi |m| / 2^j) exp(-i pi m (2k+1) / 2^j)
//! phi_{mjk} = 2^{-j/2} A(2 pi |m| / 2^j) exp(-2 pi i m k / 2^j)
//! ```
//!
//! where `b` and `A` are the wavelet and scaling magnitude profiles of
//! [`crate::window`]. The half-sample phase in `psi` comes from the
//! `e^{-i omega/2}` factor of the mother wavelet; the orthonormality tests pin
//! this sign. Band limits in integer frequencies: the wavelet at level `j`
//! touches exactly `2^j/3 < |m| < 2^{j+2}/3`, the scaling function at level
//! `j` touches `|m| < 2^{j+1}/3` (band edges are never integers, so no
//! boundary cases arise).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::window::{scaling_profile, wavelet_profile};

/// Which family of basis functions a band refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    Wavelet,
    Scaling,
}

/// The set of integer frequencies touched by one resolution level.
///
/// Wavelet bands are the two symmetric runs `lo <= |m| <= hi`; scaling bands
/// are the single run `|m| <= hi` (including zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandIndexSet {
    pub j: u32,
    pub kind: BandKind,
    lo: i64,
    hi: i64,
}

impl BandIndexSet {
    fn wavelet(j: u32) -> Self {
        let p = 1i64 << j;
        Self {
            j,
            kind: BandKind::Wavelet,
            lo: p / 3 + 1,
            hi: 4 * p / 3,
        }
    }

    fn scaling(j: u32) -> Self {
        let p = 1i64 << j;
        Self {
            j,
            kind: BandKind::Scaling,
            lo: 0,
            hi: 2 * p / 3,
        }
    }

    /// Smallest positive `|m|` in the band (0 for scaling bands).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Largest `|m|` in the band.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, m: i64) -> bool {
        let a = m.abs();
        a >= self.lo && a <= self.hi
    }

    /// Number of integer frequencies in the band.
    pub fn len(&self) -> usize {
        match self.kind {
            BandKind::Wavelet => 2 * (self.hi - self.lo + 1) as usize,
            BandKind::Scaling => (2 * self.hi + 1) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates the band in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        (-hi..=hi).filter(move |m| m.abs() >= lo)
    }
}

/// Basis of periodized, band-limited wavelets with profile values tabulated
/// per level. Immutable after construction; all lookups are pure.
#[derive(Debug, Clone)]
pub struct MeyerBasis {
    j_max: u32,
    // wavelet_tab[j][m - lo(j)] = b(2 pi m / 2^j) for positive band m
    wavelet_tab: Vec<Vec<f64>>,
    // scaling_tab[j][m] = A(2 pi m / 2^j) for m = 0..=hi(j)
    scaling_tab: Vec<Vec<f64>>,
}

impl MeyerBasis {
    /// Tabulates all levels `j <= j_max`.
    pub fn new(j_max: u32) -> Self {
        assert!(j_max <= 24, "j_max = {j_max} is far beyond desk scale");
        let mut wavelet_tab = Vec::with_capacity(j_max as usize + 1);
        let mut scaling_tab = Vec::with_capacity(j_max as usize + 1);
        for j in 0..=j_max {
            let scale = (1i64 << j) as f64;
            let wb = BandIndexSet::wavelet(j);
            wavelet_tab.push(
                (wb.lo..=wb.hi)
                    .map(|m| wavelet_profile(2.0 * PI * m as f64 / scale))
                    .collect(),
            );
            let sb = BandIndexSet::scaling(j);
            scaling_tab.push(
                (0..=sb.hi)
                    .map(|m| scaling_profile(2.0 * PI * m as f64 / scale))
                    .collect(),
            );
        }
        Self {
            j_max,
            wavelet_tab,
            scaling_tab,
        }
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Total number of tabulated profile samples across all levels.
    pub fn window_resolution(&self) -> usize {
        self.wavelet_tab.iter().map(Vec::len).sum::<usize>()
            + self.scaling_tab.iter().map(Vec::len).sum::<usize>()
    }

    fn check_level(&self, j: u32) -> Result<()> {
        if j > self.j_max {
            return Err(Error::Capacity {
                requested: j,
                capacity: self.j_max,
            });
        }
        Ok(())
    }

    /// The wavelet band `C_j`.
    pub fn band(&self, j: u32) -> BandIndexSet {
        BandIndexSet::wavelet(j)
    }

    /// The scaling band at level `j0`.
    pub fn scaling_band(&self, j0: u32) -> BandIndexSet {
        BandIndexSet::scaling(j0)
    }

    fn wavelet_mag(&self, j: u32, m: i64) -> f64 {
        let band = BandIndexSet::wavelet(j);
        if !band.contains(m) {
            return 0.0;
        }
        self.wavelet_tab[j as usize][(m.abs() - band.lo) as usize]
    }

    fn scaling_mag(&self, j: u32, m: i64) -> f64 {
        let band = BandIndexSet::scaling(j);
        if !band.contains(m) {
            return 0.0;
        }
        self.scaling_tab[j as usize][m.unsigned_abs() as usize]
    }

    /// Fourier coefficient `psi_{mjk}` of the periodized wavelet.
    pub fn wavelet_fourier_coeff(&self, j: u32, k: u32, m: i64) -> Result<Complex64> {
        self.check_level(j)?;
        check_position(j, k)?;
        let mag = self.wavelet_mag(j, m);
        if mag == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // phase -pi m (2k+1) / 2^j, reduced mod 2*pi in exact integer arithmetic
        let period = 1i128 << (j + 1);
        let q = (m as i128 * (2 * k as i128 + 1)).rem_euclid(period);
        let phase = -PI * q as f64 / (1i64 << j) as f64;
        let amp = mag / ((1i64 << j) as f64).sqrt();
        Ok(Complex64::from_polar(amp, phase))
    }

    /// Fourier coefficient `phi_{mjk}` of the periodized scaling function.
    pub fn scaling_fourier_coeff(&self, j0: u32, k: u32, m: i64) -> Result<Complex64> {
        self.check_level(j0)?;
        check_position(j0, k)?;
        let mag = self.scaling_mag(j0, m);
        if mag == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let period = 1i128 << j0;
        let q = (m as i128 * k as i128).rem_euclid(period);
        let phase = -2.0 * PI * q as f64 / (1i64 << j0) as f64;
        let amp = mag / ((1i64 << j0) as f64).sqrt();
        Ok(Complex64::from_polar(amp, phase))
    }
}

fn check_position(j: u32, k: u32) -> Result<()> {
    if (k as u64) >= (1u64 << j) {
        return Err(Error::Parameter(format!(
            "position k = {k} out of range at level j = {j}"
        )));
    }
    Ok(())
}

/// Scaling and wavelet coefficients of a function between levels `j0`
/// (inclusive) and `j_upper` (exclusive for the wavelet part).
#[derive(Debug, Clone)]
pub struct WaveletDecomposition {
    j0: u32,
    j_upper: u32,
    a: Vec<Complex64>,
    b: Vec<Vec<Complex64>>,
}

impl WaveletDecomposition {
    /// All-zero decomposition.
    pub fn zeros(j0: u32, j_upper: u32) -> Self {
        assert!(j_upper >= j0);
        let a = vec![Complex64::new(0.0, 0.0); 1 << j0];
        let b = (j0..j_upper)
            .map(|j| vec![Complex64::new(0.0, 0.0); 1 << j])
            .collect();
        Self { j0, j_upper, a, b }
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    /// One past the last wavelet level (`J` in the tuning rules).
    pub fn j_upper(&self) -> u32 {
        self.j_upper
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn a_mut(&mut self) -> &mut [Complex64] {
        &mut self.a
    }

    pub fn b_level(&self, j: u32) -> &[Complex64] {
        assert!(j >= self.j0 && j < self.j_upper, "level {j} not present");
        &self.b[(j - self.j0) as usize]
    }

    pub fn b_level_mut(&mut self, j: u32) -> &mut [Complex64] {
        assert!(j >= self.j0 && j < self.j_upper, "level {j} not present");
        &mut self.b[(j - self.j0) as usize]
    }

    /// Wavelet levels present, in increasing order.
    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.j0..self.j_upper
    }

    /// Total coefficient energy `sum |a|^2 + sum |b|^2`.
    pub fn energy(&self) -> f64 {
        self.a.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self
                .b
                .iter()
                .flat_map(|lvl| lvl.iter())
                .map(|c| c.norm_sqr())
                .sum::<f64>()
    }

    /// Largest imaginary part over all coefficients.
    pub fn imag_residue(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter().flatten())
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// Checks the imaginary residue against `tol` (scaled by the coefficient
    /// energy) and discards it, yielding a real-coefficient decomposition.
    pub fn realized(mut self, tol: f64) -> Result<Self> {
        let scale = self.energy().sqrt().max(1.0);
        let residue = self.imag_residue();
        if residue > tol * scale {
            return Err(Error::Precondition(format!(
                "decomposition of a supposedly real function has imaginary residue {residue:.3e} \
                 (tolerance {:.3e})",
                tol * scale
            )));
        }
        for c in self.a.iter_mut().chain(self.b.iter_mut().flatten()) {
            c.im = 0.0;
        }
        Ok(self)
    }
}

/// Largest `|m|` needed to represent levels `j0 <= j < j_upper` plus the
/// scaling band at `j0`.
pub fn required_mmax(j0: u32, j_upper: u32) -> i64 {
    if j_upper > j0 {
        BandIndexSet::wavelet(j_upper - 1).hi()
    } else {
        BandIndexSet::scaling(j0).hi()
    }
}

fn check_bandwidth(f_mmax: i64, j0: u32, j_upper: u32) -> Result<()> {
    let need = required_mmax(j0, j_upper);
    if f_mmax < need {
        return Err(Error::Bandwidth {
            have: f_mmax,
            need,
            j0,
            j_upper,
        });
    }
    Ok(())
}

fn check_levels(basis: &MeyerBasis, j0: u32, j_upper: u32) -> Result<()> {
    if j_upper < j0 {
        return Err(Error::Parameter(format!(
            "j_upper = {j_upper} below j0 = {j0}"
        )));
    }
    let top = if j_upper > j0 { j_upper - 1 } else { j0 };
    if top.max(j0) > basis.j_max() {
        return Err(Error::Capacity {
            requested: top.max(j0),
            capacity: basis.j_max(),
        });
    }
    Ok(())
}

// Unit phasor e^{i theta} with theta = pi * q / 2^j, q integer.
fn phasor(q: i128, j: u32) -> Complex64 {
    let period = 1i128 << (j + 1);
    Complex64::from_polar(1.0, PI * q.rem_euclid(period) as f64 / (1i64 << j) as f64)
}

/// Projects a Fourier series onto the basis: `a_{j0 k} = sum_m f_m
/// conj(phi_{m j0 k})`, `b_{jk} = sum_m f_m conj(psi_{mjk})` over the
/// respective bands.
pub fn analyze(
    f: &FourierSeries,
    j0: u32,
    j_upper: u32,
    basis: &MeyerBasis,
) -> Result<WaveletDecomposition> {
    check_levels(basis, j0, j_upper)?;
    check_bandwidth(f.mmax(), j0, j_upper)?;
    let mut w = WaveletDecomposition::zeros(j0, j_upper);

    // Scaling part. conj(phi_{m j0 k}) has phase +2 pi m k / 2^{j0}.
    let sb = basis.scaling_band(j0);
    let amp0 = 1.0 / ((1i64 << j0) as f64).sqrt();
    for k in 0..(1usize << j0) {
        let rho = phasor(2 * k as i128, j0); // e^{2 pi i k / 2^{j0}}
        let mut ph = Complex64::new(1.0, 0.0); // phase at m = 0
        let mut acc = basis.scaling_mag(j0, 0) * f.get(0);
        for m in 1..=sb.hi() {
            ph *= rho;
            if m % 32 == 0 {
                ph = phasor(2 * m as i128 * k as i128, j0);
            }
            let mag = basis.scaling_mag(j0, m);
            if mag == 0.0 {
                continue;
            }
            acc += mag * (f.get(m) * ph + f.get(-m) * ph.conj());
        }
        w.a[k] = amp0 * acc;
    }

    // Wavelet part. conj(psi_{mjk}) has phase +pi m (2k+1) / 2^j.
    for j in j0..j_upper {
        let band = basis.band(j);
        let amp = 1.0 / ((1i64 << j) as f64).sqrt();
        for k in 0..(1usize << j) {
            let odd = 2 * k as i128 + 1;
            let rho = phasor(odd, j); // e^{i pi (2k+1) / 2^j}
            let mut ph = phasor(odd * band.lo() as i128, j);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in band.lo()..=band.hi() {
                let mag = basis.wavelet_mag(j, m);
                acc += mag * (f.get(m) * ph + f.get(-m) * ph.conj());
                ph *= rho;
                if (m - band.lo()) % 32 == 31 {
                    ph = phasor(odd * (m + 1) as i128, j);
                }
            }
            w.b[(j - j0) as usize][k] = amp * acc;
        }
    }
    Ok(w)
}

/// Reconstructs a Fourier series from a decomposition: `f_m = sum_k a_{j0 k}
/// phi_{m j0 k} + sum_{j,k} b_{jk} psi_{mjk}`. Left inverse of [`analyze`] on
/// series supported by the represented bands.
pub fn synthesize(w: &WaveletDecomposition, mmax: i64, basis: &MeyerBasis) -> Result<FourierSeries> {
    check_levels(basis, w.j0, w.j_upper)?;
    check_bandwidth(mmax, w.j0, w.j_upper)?;
    let mut f = FourierSeries::zeros(mmax);

    let j0 = w.j0;
    let sb = basis.scaling_band(j0);
    let amp0 = 1.0 / ((1i64 << j0) as f64).sqrt();
    for (k, &a) in w.a.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        // phi_{m j0 k} has phase -2 pi m k / 2^{j0}
        let rho = phasor(-2 * (k as i128), j0);
        let mut ph = Complex64::new(1.0, 0.0);
        f.add(0, amp0 * basis.scaling_mag(j0, 0) * a);
        for m in 1..=sb.hi() {
            ph *= rho;
            if m % 32 == 0 {
                ph = phasor(-2 * m as i128 * k as i128, j0);
            }
            let mag = basis.scaling_mag(j0, m);
            if mag == 0.0 {
                continue;
            }
            f.add(m, amp0 * mag * a * ph);
            f.add(-m, amp0 * mag * a * ph.conj());
        }
    }

    for j in w.j0..w.j_upper {
        let band = basis.band(j);
        let amp = 1.0 / ((1i64 << j) as f64).sqrt();
        for (k, &bcoef) in w.b[(j - w.j0) as usize].iter().enumerate() {
            if bcoef == Complex64::new(0.0, 0.0) {
                continue;
            }
            let odd = 2 * k as i128 + 1;
            let rho = phasor(-odd, j);
            let mut ph = phasor(-odd * band.lo() as i128, j);
            for m in band.lo()..=band.hi() {
                let mag = basis.wavelet_mag(j, m);
                f.add(m, amp * mag * bcoef * ph);
                f.add(-m, amp * mag * bcoef * ph.conj());
                ph *= rho;
                if (m - band.lo()) % 32 == 31 {
                    ph = phasor(-odd * (m + 1) as i128, j);
                }
            }
        }
    }
    Ok(f)
}
