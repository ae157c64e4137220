//! Monte Carlo L2-risk estimation, rate predictions, and test functions of
//! controlled smoothness.
//!
//! The risk of an estimate is computed in the coefficient domain by Parseval
//! (estimate minus truth over the union of their bands), so no quadrature
//! error enters the rate fits, and the truth's energy outside the estimated
//! band is always accounted for.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{self, PlanSpec, ResolvedRegime, ThresholdPlan};
use crate::fourier::FourierSeries;
use crate::kernels::{ConvolutionKernel, KernelDecay, SamplingDesign};
use crate::meyer::{self, MeyerBasis};
use crate::model;
use crate::rng::RngSpec;

/// Smoothness-class parameters of a Besov ball `B^s_{p,q}(A)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    /// Ball radius `A`.
    pub radius: f64,
}

impl BesovParams {
    /// Validates `s > max(0, 1/p - 1/2)`, `1 <= p, q <= inf`, `A > 0`.
    pub fn new(s: f64, p: f64, q: f64, radius: f64) -> Result<Self> {
        if p.is_nan() || q.is_nan() || p < 1.0 || q < 1.0 {
            return Err(Error::Hypothesis(format!(
                "need 1 <= p, q <= inf; got p = {p}, q = {q}"
            )));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Hypothesis(format!("radius A = {radius} must be > 0")));
        }
        let floor = (1.0 / p - 0.5).max(0.0);
        if s.is_nan() || s <= floor {
            return Err(Error::Hypothesis(format!(
                "need s > max(0, 1/p - 1/2) = {floor}; got s = {s}"
            )));
        }
        Ok(Self { s, p, q, radius })
    }

    /// `s' = s + 1/2 - 1/p`.
    pub fn s_prime(&self) -> f64 {
        self.s + 0.5 - if self.p.is_infinite() { 0.0 } else { 1.0 / self.p }
    }

    /// `p' = min(p, 2)`.
    pub fn p_prime(&self) -> f64 {
        self.p.min(2.0)
    }

    /// `s* = s + 1/2 - 1/p'`.
    pub fn s_star(&self) -> f64 {
        self.s + 0.5 - 1.0 / self.p_prime()
    }
}

/// Which minimax regime a (smoothness, kernel) pair falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateCase {
    Dense,
    Sparse,
    Boundary,
    Supersmooth,
}

/// Theoretical convergence-rate prediction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RatePrediction {
    pub case: RateCase,
    /// Risk decays like `n^{-exponent}` (regular) or `(ln n)^{-exponent}`
    /// (super-smooth); the sparse/boundary scale is `(ln n / n)^{exponent}`.
    pub exponent: f64,
    /// Extra `(ln n)^{rho1}` factor in the upper bound.
    pub log_factor_rho1: f64,
    /// Whether the upper-bound hypothesis `s > 1/p'` also holds (the rate
    /// regions themselves only need `s > max(0, 1/p - 1/2)`).
    pub upper_hypothesis_ok: bool,
}

/// Classifies the regime and evaluates the rate exponents.
pub fn predicted_rate(bp: &BesovParams, decay: &KernelDecay) -> Result<RatePrediction> {
    // re-validate so raw struct literals cannot sneak past the hypotheses
    let bp = BesovParams::new(bp.s, bp.p, bp.q, bp.radius)?;
    let nu = decay.nu;
    let s_star = bp.s_star();
    let upper_hypothesis_ok = bp.s > 1.0 / bp.p_prime();
    if decay.alpha > 0.0 {
        return Ok(RatePrediction {
            case: RateCase::Supersmooth,
            exponent: 2.0 * s_star / decay.beta,
            log_factor_rho1: 0.0,
            upper_hypothesis_ok,
        });
    }
    let two_minus_p = if p_finite(bp.p) { 2.0 - bp.p } else { f64::NEG_INFINITY };
    let lhs = nu * two_minus_p;
    let rhs = if p_finite(bp.p) { bp.p * s_star } else { f64::INFINITY };
    let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
    let (case, exponent, rho1) = if p_finite(bp.p) && rel < 1e-12 {
        (
            RateCase::Boundary,
            2.0 * s_star / (2.0 * s_star + 2.0 * nu),
            positive_part(bp.q - bp.p) / bp.q,
        )
    } else if lhs < rhs {
        (
            RateCase::Dense,
            2.0 * bp.s / (2.0 * bp.s + 2.0 * nu + 1.0),
            (2.0 * nu + 1.0) * positive_part(two_minus_p)
                / (bp.p * (2.0 * bp.s + 2.0 * nu + 1.0)),
        )
    } else {
        (
            RateCase::Sparse,
            2.0 * s_star / (2.0 * s_star + 2.0 * nu),
            0.0,
        )
    };
    Ok(RatePrediction {
        case,
        exponent,
        log_factor_rho1: rho1,
        upper_hypothesis_ok,
    })
}

fn p_finite(p: f64) -> bool {
    p.is_finite()
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// Shapes of synthetic truth functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TestFunctionKind {
    /// Trigonometric polynomial with unit-magnitude coefficients and random
    /// phases up to `degree`.
    Trigpoly { degree: i64 },
    /// Dense worst-case shape: `b_{jk} = gamma 2^{-j(s + 1/2)}` with random
    /// signs at every position of every level below `max_level`.
    BesovDense { max_level: u32 },
    /// Sparse worst-case shape: one coefficient `gamma 2^{-j s'}` per level.
    BesovSparse { max_level: u32 },
    /// Periodized spatially inhomogeneous bump train.
    Bumps { mmax: i64 },
}

/// Builds a real test function with Besov norm exactly
/// `radius * (1 - 1e-6)` (the shape is fixed, then scaled; the norm is
/// positively homogeneous, so one division lands on the target).
pub fn make_test_function(kind: &TestFunctionKind, bp: &BesovParams, seed: u64) -> Result<FourierSeries> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let target = bp.radius * (1.0 - 1e-6);
    match kind {
        TestFunctionKind::Trigpoly { degree } => {
            if *degree < 1 {
                return Err(Error::Parameter("trigpoly degree must be >= 1".into()));
            }
            let mut f = FourierSeries::zeros(*degree);
            f.set(0, Complex64::new(1.0, 0.0));
            for m in 1..=*degree {
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                let z = Complex64::from_polar(1.0, theta);
                f.set(m, z);
                f.set(-m, z.conj());
            }
            scale_to_norm(f, bp, target)
        }
        TestFunctionKind::BesovDense { max_level } => {
            let mut w = meyer::WaveletDecomposition::zeros(0, *max_level);
            for j in 0..*max_level {
                let mag = 2f64.powf(-(j as f64) * (bp.s + 0.5));
                for c in w.b_level_mut(j) {
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    *c = Complex64::new(sign * mag, 0.0);
                }
            }
            scale_decomposition(w, bp, target)
        }
        TestFunctionKind::BesovSparse { max_level } => {
            let s_prime = bp.s_prime();
            let mut w = meyer::WaveletDecomposition::zeros(0, *max_level);
            for j in 0..*max_level {
                let k = rng.gen_range(0..(1usize << j));
                w.b_level_mut(j)[k] = Complex64::new(2f64.powf(-(j as f64) * s_prime), 0.0);
            }
            scale_decomposition(w, bp, target)
        }
        TestFunctionKind::Bumps { mmax } => {
            if *mmax < 8 {
                return Err(Error::Parameter("bumps needs mmax >= 8".into()));
            }
            // classic bump train on [0,1]
            let pos = [0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81];
            let hgt = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
            let wid = [
                0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005,
            ];
            let bump = |t: f64| -> f64 {
                let mut v = 0.0;
                for i in 0..pos.len() {
                    // nearest periodic image
                    let mut d = (t - pos[i]).abs();
                    d = d.min(1.0 - d);
                    v += hgt[i] * (1.0 + d / wid[i]).powi(-4);
                }
                v
            };
            let n_grid = (8 * *mmax) as usize;
            let mut f = FourierSeries::zeros(*mmax);
            for m in 0..=*mmax {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n_grid {
                    let t = i as f64 / n_grid as f64;
                    acc += bump(t)
                        * Complex64::from_polar(1.0, -std::f64::consts::TAU * m as f64 * t);
                }
                acc /= n_grid as f64;
                f.set(m, acc);
                if m > 0 {
                    f.set(-m, acc.conj());
                }
            }
            scale_to_norm(f, bp, target)
        }
    }
}

fn scale_decomposition(
    w: meyer::WaveletDecomposition,
    bp: &BesovParams,
    target: f64,
) -> Result<FourierSeries> {
    let norm = estimator::besov_norm(&w, bp.s, bp.p, bp.q);
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Numerical("test-function shape has zero norm".into()));
    }
    let gamma = target / norm;
    let mut w = w;
    for c in w.a_mut().iter_mut() {
        *c *= gamma;
    }
    for j in w.levels().collect::<Vec<_>>() {
        for c in w.b_level_mut(j) {
            *c *= gamma;
        }
    }
    let basis = MeyerBasis::new(w.j_upper().max(1));
    meyer::synthesize(&w, meyer::required_mmax(w.j0(), w.j_upper()), &basis)
}

fn scale_to_norm(f: FourierSeries, bp: &BesovParams, target: f64) -> Result<FourierSeries> {
    // decompose deep enough that every coefficient of f is fully captured
    // (|m| <= 2^J/3), so the sequence norm is the function's norm
    let mut j_upper = 1u32;
    while (1i64 << j_upper) / 3 < f.mmax() {
        j_upper += 1;
    }
    let basis = MeyerBasis::new(j_upper);
    let padded = f.truncated(meyer::required_mmax(0, j_upper));
    let w = meyer::analyze(&padded, 0, j_upper, &basis)?;
    let norm = estimator::besov_norm(&w, bp.s, bp.p, bp.q);
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Numerical("test-function shape has zero norm".into()));
    }
    let gamma = target / norm;
    let coeffs = f.coeffs().iter().map(|&c| c * gamma).collect();
    FourierSeries::from_coeffs(coeffs)
}

/// Which model the Monte Carlo loop simulates; derived from the kernel design.
fn is_discrete(kernel: &ConvolutionKernel) -> bool {
    kernel.design().is_discrete()
}

/// Mean and standard error of `||fhat_n - f||^2` over replicates, plus the
/// plan that produced them.
///
/// Replicates run in parallel; each one draws from its own counter-based
/// stream (`stream = seed_base.stream + replicate`), so results are
/// independent of the parallel schedule, and totals use pairwise summation
/// for bit-stable aggregation.
pub fn l2_risk(
    truth: &FourierSeries,
    kernel: &ConvolutionKernel,
    basis: &MeyerBasis,
    spec: &PlanSpec,
    n: f64,
    replicates: u64,
    seed_base: RngSpec,
) -> Result<(f64, f64, ThresholdPlan)> {
    if replicates < 2 {
        return Err(Error::Precondition(
            "need at least 2 replicates for a standard error".into(),
        ));
    }
    let plan = estimator::make_plan(kernel, basis, n, spec)?;
    let sim_mmax = plan.required_mmax();
    let truth_sim = truth.truncated(sim_mmax);
    let tail = truth.tail_energy(sim_mmax);

    let (grid_len, channels) = if is_discrete(kernel) {
        let m = kernel.design().channels();
        let grid = n / m as f64;
        if grid.fract() != 0.0 {
            return Err(Error::Parameter(format!(
                "discrete design with M = {m} channels needs n divisible by M, got n = {n}"
            )));
        }
        (grid as usize, m)
    } else {
        (0, 1)
    };
    let _ = channels;

    let risks: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let seed = RngSpec::new(seed_base.master_seed, seed_base.stream + rep);
            let fhat = if is_discrete(kernel) {
                let obs = model::simulate_discrete(&truth_sim, kernel, grid_len, seed)?;
                obs.estimate_fm(kernel, sim_mmax)?
            } else {
                model::simulate_continuous(&truth_sim, kernel, n, seed)?.fhat
            };
            let est = estimator::estimate(&fhat, &plan, basis)?;
            Ok(est.distance_sq(&truth_sim) + tail)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mean = pairwise_sum(&risks) / replicates as f64;
    let sq_dev: Vec<f64> = risks.iter().map(|r| (r - mean) * (r - mean)).collect();
    let var = pairwise_sum(&sq_dev) / (replicates - 1) as f64;
    let se = (var / replicates as f64).sqrt();
    Ok((mean, se, plan))
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// One row of a risk curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskPoint {
    pub n: f64,
    pub mean_risk: f64,
    pub se: f64,
    pub replicates: u64,
    pub j0: u32,
    pub j_upper: u32,
    pub degenerate: bool,
    pub regime: ResolvedRegime,
}

/// Monte Carlo risk across a grid of sample sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskCurve {
    pub points: Vec<RiskPoint>,
    pub prediction: Option<RatePrediction>,
}

/// Runs the full campaign over `n_grid`. Streams are partitioned per point
/// so replicate draws never overlap across sample sizes.
pub fn risk_curve(
    truth: &FourierSeries,
    kernel: &ConvolutionKernel,
    basis: &MeyerBasis,
    spec: &PlanSpec,
    n_grid: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<RiskCurve> {
    let mut points = Vec::with_capacity(n_grid.len());
    for (idx, &n) in n_grid.iter().enumerate() {
        let seed_base = RngSpec::new(master_seed, (idx as u64) << 32);
        let (mean_risk, se, plan) =
            l2_risk(truth, kernel, basis, spec, n, replicates, seed_base)?;
        points.push(RiskPoint {
            n,
            mean_risk,
            se,
            replicates,
            j0: plan.j0,
            j_upper: plan.j_upper,
            degenerate: plan.degenerate,
            regime: plan.regime,
        });
    }
    Ok(RiskCurve {
        points,
        prediction: None,
    })
}

/// Abscissa for slope fits: `ln n` for polynomial rates, `ln ln n` for
/// super-smooth (logarithmic) rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeAxis {
    LogN,
    LogLogN,
}

/// Weighted least-squares fit of `ln(mean risk)` against the chosen axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval from the fit covariance.
    pub ci_half_width: f64,
    pub axis: SlopeAxis,
    pub points_used: usize,
    pub dropped_degenerate: usize,
}

/// Fits the log-log slope of a risk curve.
///
/// Requires at least 4 distinct sample sizes spanning two decades. Points
/// whose plan was degenerate (regular regime collapsed to linear) are dropped
/// from the fit and reported. Weights are `1/se^2` on the log scale, i.e.
/// `(mean/se)^2` by the delta method.
pub fn rate_slope(curve: &RiskCurve, axis: SlopeAxis) -> Result<SlopeFit> {
    let ns: Vec<f64> = curve.points.iter().map(|p| p.n).collect();
    let distinct = {
        let mut v = ns.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    };
    if distinct.len() < 4 {
        return Err(Error::Precondition(format!(
            "slope fit needs >= 4 distinct sample sizes, got {}",
            distinct.len()
        )));
    }
    let span = distinct.last().unwrap() / distinct.first().unwrap();
    if span < 100.0 {
        return Err(Error::Precondition(format!(
            "slope fit needs the sample sizes to span >= 2 decades, got a factor of {span:.3}"
        )));
    }

    let usable: Vec<&RiskPoint> = curve.points.iter().filter(|p| !p.degenerate).collect();
    let dropped = curve.points.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::Precondition(
            "fewer than 3 non-degenerate points left for the fit".into(),
        ));
    }

    let mut xs = Vec::with_capacity(usable.len());
    let mut ys = Vec::with_capacity(usable.len());
    let mut ws = Vec::with_capacity(usable.len());
    for p in &usable {
        if p.mean_risk.is_nan() || p.mean_risk <= 0.0 {
            return Err(Error::Numerical(format!(
                "mean risk at n = {} is not positive; cannot take logs",
                p.n
            )));
        }
        let x = match axis {
            SlopeAxis::LogN => p.n.ln(),
            SlopeAxis::LogLogN => p.n.ln().ln(),
        };
        xs.push(x);
        ys.push(p.mean_risk.ln());
        let w = if p.se > 0.0 {
            (p.mean_risk / p.se).powi(2)
        } else {
            1e12 // synthetic, noise-free point
        };
        ws.push(w);
    }

    let wsum: f64 = ws.iter().sum();
    let xbar: f64 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let ybar: f64 = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .zip(&ws)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let ci_half_width = 1.96 / sxx.sqrt();
    Ok(SlopeFit {
        slope,
        intercept: ybar - slope * xbar,
        ci_half_width,
        axis,
        points_used: usable.len(),
        dropped_degenerate: dropped,
    })
}

/// Convenience constructor of a synthetic curve for slope checks.
pub fn synthetic_curve(points: &[(f64, f64)]) -> RiskCurve {
    RiskCurve {
        points: points
            .iter()
            .map(|&(n, risk)| RiskPoint {
                n,
                mean_risk: risk,
                se: 0.0,
                replicates: 0,
                j0: 0,
                j_upper: 0,
                degenerate: false,
                regime: ResolvedRegime::Regular,
            })
            .collect(),
        prediction: None,
    }
}

/// Kernels used in experiments, resolved from configuration.
pub fn design_channels(design: &SamplingDesign) -> usize {
    design.channels()
}
