//! Distributional checks of the observation models at Monte Carlo scale.

use num_complex::Complex64;

use fundeconv::estimator;
use fundeconv::kernels::{ConvolutionKernel, SamplingDesign};
use fundeconv::meyer::{self, MeyerBasis};
use fundeconv::model;
use fundeconv::rng::RngSpec;
use fundeconv::FourierSeries;

fn real_series(seed: u64, mmax: i64) -> FourierSeries {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut f = FourierSeries::zeros(mmax);
    f.set(0, Complex64::new(rng.gen::<f64>() - 0.5, 0.0));
    for m in 1..=mmax {
        let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        f.set(m, z);
        f.set(-m, z.conj());
    }
    f
}

#[test]
fn continuous_estimates_are_unbiased() {
    let truth = real_series(3, 8);
    let kernel = ConvolutionKernel::wave(0.25, 0.75).unwrap();
    let n = 256.0;
    let reps = 10_000u64;
    let mut mean = vec![Complex64::new(0.0, 0.0); 17];
    for r in 0..reps {
        let obs = model::simulate_continuous(&truth, &kernel, n, RngSpec::new(41, r)).unwrap();
        for (i, (_, c)) in obs.estimate_fm().iter().enumerate() {
            mean[i] += c;
        }
    }
    for (i, acc) in mean.iter().enumerate() {
        let m = i as i64 - 8;
        let avg = acc / reps as f64;
        let sd = 1.0 / (n * kernel.tau(1, m).unwrap()).sqrt();
        let se = sd / (reps as f64).sqrt();
        let dev = (avg - truth.get(m)).norm();
        assert!(dev < 3.0 * se + 1e-12, "m={m}: bias {dev:.3e} vs se {se:.3e}");
    }
}

#[test]
fn discrete_estimates_are_unbiased() {
    let truth = real_series(5, 4);
    let kernel = ConvolutionKernel::heat(0.05, 0.2)
        .unwrap()
        .with_design(SamplingDesign::Discrete {
            points: vec![0.05, 0.1, 0.2],
        })
        .unwrap();
    let grid = 64usize;
    let reps = 4000u64;
    let n = (grid * 3) as f64;
    let mut mean = [Complex64::new(0.0, 0.0); 9];
    for r in 0..reps {
        let obs = model::simulate_discrete(&truth, &kernel, grid, RngSpec::new(91, r)).unwrap();
        for (i, (_, c)) in obs.estimate_fm(&kernel, 4).unwrap().iter().enumerate() {
            mean[i] += c;
        }
    }
    for (i, acc) in mean.iter().enumerate() {
        let m = i as i64 - 4;
        let avg = acc / reps as f64;
        let sd = 1.0 / (n * kernel.tau(1, m).unwrap()).sqrt();
        let se = sd / (reps as f64).sqrt();
        let dev = (avg - truth.get(m)).norm();
        assert!(dev < 4.0 * se + 1e-12, "m={m}: bias {dev:.3e} vs se {se:.3e}");
    }
}

#[test]
fn coefficient_error_covariance_is_diagonal() {
    // cov(fhat_{m1} - f_{m1}, conj(fhat_{m2} - f_{m2})) =
    // delta(m1 - m2) / (n tau_1(m1))
    let truth = real_series(7, 10);
    let kernel = ConvolutionKernel::wave(0.3, 0.7).unwrap();
    let n = 128.0;
    let reps = 20_000u64;
    let probe: &[(i64, i64)] = &[(1, 1), (1, 2), (2, 5), (3, 3), (1, -1), (4, 9)];
    let mut acc = vec![Complex64::new(0.0, 0.0); probe.len()];
    for r in 0..reps {
        let obs = model::simulate_continuous(&truth, &kernel, n, RngSpec::new(55, r)).unwrap();
        for (idx, &(m1, m2)) in probe.iter().enumerate() {
            let d1 = obs.fhat.get(m1) - truth.get(m1);
            let d2 = obs.fhat.get(m2) - truth.get(m2);
            acc[idx] += d1 * d2.conj();
        }
    }
    for (idx, &(m1, m2)) in probe.iter().enumerate() {
        let cov = acc[idx] / reps as f64;
        let v1 = 1.0 / (n * kernel.tau(1, m1).unwrap());
        let v2 = 1.0 / (n * kernel.tau(1, m2).unwrap());
        let se = (v1 * v2).sqrt() / (reps as f64).sqrt();
        let expect = if m1 == m2 { v1 } else { 0.0 };
        let dev = (cov - Complex64::new(expect, 0.0)).norm();
        assert!(
            dev < 4.0 * se,
            "({m1},{m2}): cov {cov}, expect {expect:.3e}, se {se:.3e}"
        );
    }
}

// Coefficient-estimator moment bounds: E|bhat - b|^{2 kappa} <=
// C n^{-kappa} Delta_kappa(j) for kappa = 1, 2, with one fitted constant
// that is stable across sample sizes.
#[test]
fn wavelet_coefficient_moments_scale_with_the_band_statistic() {
    let kernel = ConvolutionKernel::wave(0.25, 0.75).unwrap();
    let basis = MeyerBasis::new(6);
    let truth = FourierSeries::zeros(meyer::required_mmax(4, 6)); // b_{jk} = 0
    let reps = 4000u64;
    let mut ratios: Vec<((u32, u8, u32), f64)> = Vec::new();
    for (gen, &n) in [1024.0f64, 16384.0].iter().enumerate() {
        let mut m2 = [[0.0f64; 2]; 2]; // [level j-4][kappa-1]
        let mut m4 = [[0.0f64; 2]; 2];
        for r in 0..reps {
            let obs = model::simulate_continuous(
                &truth,
                &kernel,
                n,
                RngSpec::new(77 + gen as u64, r),
            )
            .unwrap();
            let w = meyer::analyze(&obs.fhat, 4, 6, &basis).unwrap();
            for (jdx, j) in [4u32, 5].iter().enumerate() {
                for (kdx, k) in [0usize, 3].iter().enumerate() {
                    let b = w.b_level(*j)[*k].norm_sqr();
                    m2[jdx][kdx] += b;
                    m4[jdx][kdx] += b * b;
                }
            }
        }
        for (jdx, j) in [4u32, 5].iter().enumerate() {
            let d1 = kernel.delta_stat(&basis, 1, *j).unwrap();
            let d2 = kernel.delta_stat(&basis, 2, *j).unwrap();
            for kdx in 0..2 {
                let e2 = m2[jdx][kdx] / reps as f64;
                let e4 = m4[jdx][kdx] / reps as f64;
                ratios.push(((*j, 1, gen as u32), e2 / (d1 / n)));
                ratios.push(((*j, 2, gen as u32), e4 / (d2 / (n * n))));
            }
        }
    }
    let fitted_c = ratios.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    assert!(
        fitted_c.is_finite() && fitted_c < 10.0,
        "fitted C = {fitted_c}: {ratios:?}"
    );
    // the same constant works at both sample sizes: the n^{-kappa} scaling is
    // right if each (j, kappa) ratio moves by less than 50% between the runs
    for j in [4u32, 5] {
        for kappa in [1u8, 2] {
            let at = |gen: u32| -> f64 {
                ratios
                    .iter()
                    .filter(|&&((jj, kk, gg), _)| jj == j && kk == kappa && gg == gen)
                    .map(|&(_, r)| r)
                    .fold(0.0, f64::max)
            };
            let (r0, r1) = (at(0), at(1));
            assert!(
                r0 / r1 < 1.5 && r1 / r0 < 1.5,
                "(j={j}, kappa={kappa}): ratios {r0:.3} vs {r1:.3} drift across n"
            );
        }
    }
}

#[test]
fn estimator_beats_the_unthresholded_inversion_on_average() {
    // identity blur at moderate n: thresholding must reduce the mean squared
    // error relative to keeping every coefficient of the same band
    let bp = fundeconv::risk::BesovParams::new(2.0, 2.0, 2.0, 1.0).unwrap();
    let truth = fundeconv::risk::make_test_function(
        &fundeconv::risk::TestFunctionKind::BesovDense { max_level: 8 },
        &bp,
        11,
    )
    .unwrap();
    let kernel = ConvolutionKernel::delta();
    let basis = MeyerBasis::new(8);
    let n = 4096.0;
    let spec = estimator::PlanSpec {
        regime: estimator::Regime::Regular,
        d: Some(1.0),
        ..Default::default()
    };
    let plan = estimator::make_plan(&kernel, &basis, n, &spec).unwrap();
    let truth_sim = truth.truncated(plan.required_mmax());
    let tail = truth.tail_energy(plan.required_mmax());
    let reps = 100u64;
    let (mut thresholded, mut raw) = (0.0, 0.0);
    for r in 0..reps {
        let obs = model::simulate_continuous(&truth_sim, &kernel, n, RngSpec::new(123, r)).unwrap();
        let est = estimator::estimate(&obs.fhat, &plan, &basis).unwrap();
        thresholded += est.distance_sq(&truth_sim) + tail;
        // unthresholded: same bands, every block kept
        let w = meyer::analyze(&obs.fhat, plan.j0, plan.j_upper, &basis).unwrap();
        let full = meyer::synthesize(&w, plan.required_mmax(), &basis).unwrap();
        raw += full.distance_sq(&truth_sim) + tail;
    }
    assert!(
        thresholded < raw,
        "thresholding should help: {:.4} vs {:.4}",
        thresholded / reps as f64,
        raw / reps as f64
    );
}
