//! Cross-module invariants of the risk harness.

use fundeconv::estimator::{self, PlanSpec, Regime};
use fundeconv::kernels::ConvolutionKernel;
use fundeconv::meyer::MeyerBasis;
use fundeconv::risk::{self, BesovParams, TestFunctionKind};
use fundeconv::rng::RngSpec;

fn dense_truth(seed: u64) -> fundeconv::FourierSeries {
    let bp = BesovParams::new(2.0, 2.0, 2.0, 1.0).unwrap();
    risk::make_test_function(&TestFunctionKind::BesovDense { max_level: 10 }, &bp, seed).unwrap()
}

// Mean risk at 16n sits below mean risk at n (3-se confidence) for every
// regular-smooth catalogue kernel.
#[test]
fn risk_decreases_from_n_to_16n_for_regular_kernels() {
    let truth = dense_truth(77);
    let basis = MeyerBasis::new(8);
    let spec = PlanSpec {
        regime: Regime::Adaptive,
        ..Default::default()
    };
    let kernels = [
        ConvolutionKernel::wave(0.25, 0.75).unwrap(),
        ConvolutionKernel::boxcar(0.25, 0.75).unwrap(),
        ConvolutionKernel::delta(),
    ];
    for kernel in &kernels {
        let n = 4096.0;
        let reps = 100;
        let (lo_mean, lo_se, _) =
            risk::l2_risk(&truth, kernel, &basis, &spec, n, reps, RngSpec::new(7, 0)).unwrap();
        let (hi_mean, hi_se, _) =
            risk::l2_risk(&truth, kernel, &basis, &spec, 16.0 * n, reps, RngSpec::new(7, 1 << 20))
                .unwrap();
        let gap_se = (lo_se * lo_se + hi_se * hi_se).sqrt();
        assert!(
            hi_mean < lo_mean - 3.0 * gap_se,
            "{}: risk({}) = {lo_mean:.4} +- {lo_se:.4}, risk({}) = {hi_mean:.4} +- {hi_se:.4}",
            kernel.name(),
            n,
            16.0 * n
        );
    }
}

// Regular plans separate j0 < J whenever n^{1/(2 nu + 1)} > 2^{3/2} ln n,
// and a collapsed plan is always flagged degenerate.
//
// The margin 2^{3/2} is what the level rounding rules guarantee: rounding
// j0 = round(log2 ln n) can gain half a binary order and J = floor(...) can
// lose a full one, so a bare factor-2 gap between n^{1/(2 nu + 1)} and ln n
// is not quite enough (n = 2^19, nu = 3/2 sits 2% above a factor 2 and still
// collapses).
#[test]
fn plan_consistency_across_the_sample_size_grid() {
    let basis = MeyerBasis::new(24);
    for exp in 10..=20u32 {
        let n = 2f64.powi(exp as i32);
        for nu in [0.0f64, 0.5, 1.0, 1.5] {
            let decay = fundeconv::kernels::KernelDecay::new(nu, 0.0, 1.0).unwrap();
            let kernel = ConvolutionKernel::delta().with_decay(decay);
            let plan = estimator::make_plan(&kernel, &basis, n, &PlanSpec {
                regime: Regime::Regular,
                ..Default::default()
            })
            .unwrap();
            if n.powf(1.0 / (2.0 * nu + 1.0)) > 2f64.powf(1.5) * n.ln() {
                assert!(
                    plan.j0 < plan.j_upper,
                    "n = 2^{exp}, nu = {nu}: expected a live wavelet range, got j0 = {} J = {}",
                    plan.j0,
                    plan.j_upper
                );
                assert!(!plan.degenerate);
            }
            if plan.j_upper == plan.j0 {
                assert!(
                    plan.degenerate,
                    "n = 2^{exp}, nu = {nu}: collapsed plan not flagged"
                );
            }
        }
    }
}

// Risk is computed against the full truth: tail energy outside the simulated
// band is charged even when the in-band part is recovered perfectly.
#[test]
fn reported_risk_never_understates_the_tail() {
    let truth = dense_truth(5);
    let kernel = ConvolutionKernel::delta();
    let basis = MeyerBasis::new(5); // deliberately small basis
    let spec = PlanSpec {
        regime: Regime::Regular,
        d: Some(0.0),
        ..Default::default()
    };
    let n = 1e8; // nearly noiseless
    let (mean, _, plan) =
        risk::l2_risk(&truth, &kernel, &basis, &spec, n, 8, RngSpec::new(3, 0)).unwrap();
    let tail = truth.tail_energy(plan.required_mmax());
    assert!(tail > 0.0, "test needs a truth with out-of-band energy");
    assert!(
        mean >= tail,
        "mean risk {mean:.6e} below the unavoidable tail {tail:.6e}"
    );
}
