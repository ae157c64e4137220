//! C ABI for the functional deconvolution library.
//!
//! Kernels are opaque handles created by `fd_kernel_*` constructors and
//! released with `fd_kernel_free`. Every fallible call returns an [`FdStatus`]
//! code; on failure a thread-local message is retrievable through
//! [`fd_last_error_message`]. Complex arrays are passed as separate
//! real/imaginary buffers of length `2 * mmax + 1`, ordered
//! `m = -mmax ..= mmax`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fundeconv::error::Error;
use fundeconv::estimator::{self, PlanSpec, Regime};
use fundeconv::fourier::FourierSeries;
use fundeconv::kernels::ConvolutionKernel;
use fundeconv::meyer::MeyerBasis;
use fundeconv::model;
use fundeconv::risk::{predicted_rate, BesovParams, RateCase};
use fundeconv::rng::RngSpec;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    FdOk = 0,
    /// A parameter was outside its admissible domain.
    FdErrParameter = 1,
    /// The kernel energy vanishes at a needed frequency.
    FdErrIllPosed = 2,
    /// A numerical routine failed to converge.
    FdErrNumerical = 3,
    /// A resolution level exceeded the basis capacity.
    FdErrCapacity = 4,
    /// Insufficient bandwidth or an output buffer that is too small.
    FdErrBuffer = 5,
    /// A null pointer was passed where data was required.
    FdErrNullPointer = 6,
    /// A panic was caught at the boundary (library bug; please report).
    FdErrInternal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_from(e: &Error) -> FdStatus {
    match e {
        Error::Parameter(_) | Error::Precondition(_) | Error::Hypothesis(_) => {
            FdStatus::FdErrParameter
        }
        Error::IllPosed { .. } => FdStatus::FdErrIllPosed,
        Error::Numerical(_) | Error::RegimeMismatch(_) => FdStatus::FdErrNumerical,
        Error::Capacity { .. } => FdStatus::FdErrCapacity,
        Error::Bandwidth { .. } | Error::Aliasing { .. } => FdStatus::FdErrBuffer,
    }
}

fn guard(f: impl FnOnce() -> FdStatus) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the FFI boundary");
            FdStatus::FdErrInternal
        }
    }
}

/// Opaque kernel handle.
pub struct FdKernel {
    inner: ConvolutionKernel,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string contains NUL"),
    };
    VERSION.as_ptr()
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn fd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

fn emit_kernel(out: *mut *mut FdKernel, result: Result<ConvolutionKernel, Error>) -> FdStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return FdStatus::FdErrNullPointer;
    }
    match result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FdKernel { inner })) };
            FdStatus::FdOk
        }
        Err(e) => {
            set_error(e.to_string());
            status_from(&e)
        }
    }
}

/// Heat-equation kernel observed on `[a, b]`, `0 < a <= b`.
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_heat(a: f64, b: f64, out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, ConvolutionKernel::heat(a, b)))
}

/// Laplacian-on-the-disc kernel observed on `[0, r0]`, `0 < r0 < 1`.
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_circle(r0: f64, out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, ConvolutionKernel::circle(r0)))
}

/// Laplacian-on-a-strip kernel observed on `[a, b]`, `0 < a <= b`.
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_rectangle(a: f64, b: f64, out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, ConvolutionKernel::rectangle(a, b)))
}

/// Wave-equation kernel observed on `[a, b]`, `0 < a <= b < 1`.
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_wave(a: f64, b: f64, out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, ConvolutionKernel::wave(a, b)))
}

/// Normalised boxcar kernel observed on `[a, b]`, `0 < a <= b`.
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_boxcar(a: f64, b: f64, out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, ConvolutionKernel::boxcar(a, b)))
}

/// Identity blur (direct denoising).
///
/// # Safety
/// `out` must be a valid pointer to a kernel-handle slot.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_delta(out: *mut *mut FdKernel) -> FdStatus {
    guard(|| emit_kernel(out, Ok(ConvolutionKernel::delta())))
}

/// Releases a kernel handle. Null is a no-op.
///
/// # Safety
/// `kernel` must have come from an `fd_kernel_*` constructor and not have
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_free(kernel: *mut FdKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

unsafe fn kernel_ref<'a>(kernel: *const FdKernel) -> Result<&'a ConvolutionKernel, FdStatus> {
    if kernel.is_null() {
        set_error("kernel handle is null");
        return Err(FdStatus::FdErrNullPointer);
    }
    Ok(&(*kernel).inner)
}

/// Kernel energy `tau_kappa(m)` (`kappa` in {1, 2}).
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_tau(
    kernel: *const FdKernel,
    kappa: u8,
    m: i64,
    out: *mut f64,
) -> FdStatus {
    guard(|| {
        let k = match kernel_ref(kernel) {
            Ok(k) => k,
            Err(s) => return s,
        };
        if out.is_null() {
            set_error("output pointer is null");
            return FdStatus::FdErrNullPointer;
        }
        match k.tau(kappa, m) {
            Ok(v) => {
                *out = v;
                FdStatus::FdOk
            }
            Err(e) => {
                set_error(e.to_string());
                status_from(&e)
            }
        }
    })
}

/// `ln Delta_kappa(j)` of the kernel over the level-`j` wavelet band;
/// `basis_j_max` bounds the tabulated levels.
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_kernel_log_delta_stat(
    kernel: *const FdKernel,
    kappa: u8,
    j: u32,
    basis_j_max: u32,
    out: *mut f64,
) -> FdStatus {
    guard(|| {
        let k = match kernel_ref(kernel) {
            Ok(k) => k,
            Err(s) => return s,
        };
        if out.is_null() {
            set_error("output pointer is null");
            return FdStatus::FdErrNullPointer;
        }
        let basis = MeyerBasis::new(basis_j_max.min(20));
        match k.log_delta_stat(&basis, kappa, j) {
            Ok(v) => {
                *out = v;
                FdStatus::FdOk
            }
            Err(e) => {
                set_error(e.to_string());
                status_from(&e)
            }
        }
    })
}

/// Minimax regime of a smoothness/kernel pair.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdRateCase {
    FdRateDense = 0,
    FdRateSparse = 1,
    FdRateBoundary = 2,
    FdRateSupersmooth = 3,
}

/// Theoretical convergence-rate prediction for a Besov ball
/// `B^s_{p,q}(radius)` and a kernel with decay `(nu, alpha, beta)`.
/// The risk decays like `n^{-exponent}` (or `(ln n)^{-exponent}` in the
/// super-smooth case), times `(ln n)^{rho1}`.
///
/// # Safety
/// The three output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_predict_rate(
    s: f64,
    p: f64,
    q: f64,
    radius: f64,
    nu: f64,
    alpha: f64,
    beta: f64,
    out_case: *mut FdRateCase,
    out_exponent: *mut f64,
    out_rho1: *mut f64,
) -> FdStatus {
    guard(|| {
        if out_case.is_null() || out_exponent.is_null() || out_rho1.is_null() {
            set_error("output pointer is null");
            return FdStatus::FdErrNullPointer;
        }
        let result = BesovParams::new(s, p, q, radius).and_then(|bp| {
            let decay = fundeconv::kernels::KernelDecay::new(nu, alpha, beta)?;
            predicted_rate(&bp, &decay)
        });
        match result {
            Ok(r) => {
                *out_case = match r.case {
                    RateCase::Dense => FdRateCase::FdRateDense,
                    RateCase::Sparse => FdRateCase::FdRateSparse,
                    RateCase::Boundary => FdRateCase::FdRateBoundary,
                    RateCase::Supersmooth => FdRateCase::FdRateSupersmooth,
                };
                *out_exponent = r.exponent;
                *out_rho1 = r.log_factor_rho1;
                FdStatus::FdOk
            }
            Err(e) => {
                set_error(e.to_string());
                status_from(&e)
            }
        }
    })
}

/// Threshold regime selector for [`fd_estimate_continuous`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdRegime {
    FdRegimeAuto = 0,
    FdRegimeRegular = 1,
    FdRegimeSuper = 2,
    FdRegimeAdaptive = 3,
}

/// One-shot continuous-model estimation.
///
/// `fhat_re`/`fhat_im` hold the observed coefficient statistics for
/// `m = -mmax ..= mmax`. The block-thresholded estimate is written into
/// `out_re`/`out_im` (capacity `2 * out_capacity_mmax + 1` each); the actual
/// half-bandwidth is stored in `out_mmax`. Pass `d < 0` for the regime's
/// default threshold constant.
///
/// # Safety
/// All array pointers must reference buffers of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn fd_estimate_continuous(
    kernel: *const FdKernel,
    n: f64,
    regime: FdRegime,
    d: f64,
    fhat_re: *const f64,
    fhat_im: *const f64,
    mmax: i64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_capacity_mmax: i64,
    out_mmax: *mut i64,
) -> FdStatus {
    guard(|| {
        let k = match kernel_ref(kernel) {
            Ok(k) => k,
            Err(s) => return s,
        };
        if fhat_re.is_null() || fhat_im.is_null() || out_re.is_null() || out_im.is_null() || out_mmax.is_null() {
            set_error("an array pointer is null");
            return FdStatus::FdErrNullPointer;
        }
        if mmax < 0 || out_capacity_mmax < 0 {
            set_error("mmax must be nonnegative");
            return FdStatus::FdErrParameter;
        }
        let len = (2 * mmax + 1) as usize;
        let re = std::slice::from_raw_parts(fhat_re, len);
        let im = std::slice::from_raw_parts(fhat_im, len);
        let coeffs = re
            .iter()
            .zip(im)
            .map(|(&a, &b)| num_complex::Complex64::new(a, b))
            .collect();
        let fhat = match FourierSeries::from_coeffs(coeffs) {
            Ok(f) => f,
            Err(e) => {
                set_error(e.to_string());
                return status_from(&e);
            }
        };
        let spec = PlanSpec {
            regime: match regime {
                FdRegime::FdRegimeAuto => Regime::Auto,
                FdRegime::FdRegimeRegular => Regime::Regular,
                FdRegime::FdRegimeSuper => Regime::Super,
                FdRegime::FdRegimeAdaptive => Regime::Adaptive,
            },
            d: if d < 0.0 { None } else { Some(d) },
            ..Default::default()
        };
        let basis = MeyerBasis::new(12);
        let result = estimator::make_plan(k, &basis, n, &spec).and_then(|plan| {
            // shrink the level range to the bandwidth the caller observed
            let mut j_upper = plan.j_upper;
            while j_upper > plan.j0
                && fundeconv::meyer::required_mmax(plan.j0, j_upper) > fhat.mmax()
            {
                j_upper -= 1;
            }
            let plan = if j_upper == plan.j_upper {
                plan
            } else {
                let clipped = PlanSpec {
                    j0_override: Some(plan.j0),
                    j_upper_override: Some(j_upper),
                    ..spec.clone()
                };
                estimator::make_plan(k, &basis, n, &clipped)?
            };
            estimator::estimate(&fhat, &plan, &basis)
        });
        match result {
            Ok(est) => {
                if est.mmax() > out_capacity_mmax {
                    set_error(format!(
                        "output capacity mmax = {out_capacity_mmax} below required {}",
                        est.mmax()
                    ));
                    return FdStatus::FdErrBuffer;
                }
                let out_len = (2 * est.mmax() + 1) as usize;
                let ore = std::slice::from_raw_parts_mut(out_re, out_len);
                let oim = std::slice::from_raw_parts_mut(out_im, out_len);
                for (i, (_, c)) in est.iter().enumerate() {
                    ore[i] = c.re;
                    oim[i] = c.im;
                }
                *out_mmax = est.mmax();
                FdStatus::FdOk
            }
            Err(e) => {
                set_error(e.to_string());
                status_from(&e)
            }
        }
    })
}

/// Draws one continuous-model observation of the given truth coefficients
/// and writes the statistic into `out_re`/`out_im` (length `2 * mmax + 1`).
///
/// # Safety
/// All array pointers must reference buffers of length `2 * mmax + 1`.
#[no_mangle]
pub unsafe extern "C" fn fd_simulate_continuous(
    kernel: *const FdKernel,
    n: f64,
    master_seed: u64,
    stream: u64,
    truth_re: *const f64,
    truth_im: *const f64,
    mmax: i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> FdStatus {
    guard(|| {
        let k = match kernel_ref(kernel) {
            Ok(k) => k,
            Err(s) => return s,
        };
        if truth_re.is_null() || truth_im.is_null() || out_re.is_null() || out_im.is_null() {
            set_error("an array pointer is null");
            return FdStatus::FdErrNullPointer;
        }
        if mmax < 0 {
            set_error("mmax must be nonnegative");
            return FdStatus::FdErrParameter;
        }
        let len = (2 * mmax + 1) as usize;
        let re = std::slice::from_raw_parts(truth_re, len);
        let im = std::slice::from_raw_parts(truth_im, len);
        let coeffs = re
            .iter()
            .zip(im)
            .map(|(&a, &b)| num_complex::Complex64::new(a, b))
            .collect();
        let truth = match FourierSeries::from_coeffs(coeffs) {
            Ok(f) => f,
            Err(e) => {
                set_error(e.to_string());
                return status_from(&e);
            }
        };
        match model::simulate_continuous(&truth, k, n, RngSpec::new(master_seed, stream)) {
            Ok(obs) => {
                let ore = std::slice::from_raw_parts_mut(out_re, len);
                let oim = std::slice::from_raw_parts_mut(out_im, len);
                for (i, (_, c)) in obs.fhat.iter().enumerate() {
                    ore[i] = c.re;
                    oim[i] = c.im;
                }
                FdStatus::FdOk
            }
            Err(e) => {
                set_error(e.to_string());
                status_from(&e)
            }
        }
    })
}
