/* C interface to the fundeconv functional deconvolution library. */

#ifndef FUNDECONV_H
#define FUNDECONV_H

/* Generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Minimax regime of a smoothness/kernel pair.
 */
typedef enum FdRateCase {
  FD_RATE_DENSE = 0,
  FD_RATE_SPARSE = 1,
  FD_RATE_BOUNDARY = 2,
  FD_RATE_SUPERSMOOTH = 3,
} FdRateCase;

/**
 * Threshold regime selector for [`fd_estimate_continuous`].
 */
typedef enum FdRegime {
  FD_REGIME_AUTO = 0,
  FD_REGIME_REGULAR = 1,
  FD_REGIME_SUPER = 2,
  FD_REGIME_ADAPTIVE = 3,
} FdRegime;

/**
 * Status codes returned by every fallible call.
 */
typedef enum FdStatus {
  FD_OK = 0,
  /**
   * A parameter was outside its admissible domain.
   */
  FD_ERR_PARAMETER = 1,
  /**
   * The kernel energy vanishes at a needed frequency.
   */
  FD_ERR_ILL_POSED = 2,
  /**
   * A numerical routine failed to converge.
   */
  FD_ERR_NUMERICAL = 3,
  /**
   * A resolution level exceeded the basis capacity.
   */
  FD_ERR_CAPACITY = 4,
  /**
   * Insufficient bandwidth or an output buffer that is too small.
   */
  FD_ERR_BUFFER = 5,
  /**
   * A null pointer was passed where data was required.
   */
  FD_ERR_NULL_POINTER = 6,
  /**
   * A panic was caught at the boundary (library bug; please report).
   */
  FD_ERR_INTERNAL = 7,
} FdStatus;

/**
 * Opaque kernel handle.
 */
typedef struct FdKernel FdKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fd_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated,
 * always NUL-terminated). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (then only the
 * length is returned).
 */
uintptr_t fd_last_error_message(char *buf, uintptr_t len);

/**
 * Heat-equation kernel observed on `[a, b]`, `0 < a <= b`.
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_heat(double a, double b, struct FdKernel **out);

/**
 * Laplacian-on-the-disc kernel observed on `[0, r0]`, `0 < r0 < 1`.
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_circle(double r0, struct FdKernel **out);

/**
 * Laplacian-on-a-strip kernel observed on `[a, b]`, `0 < a <= b`.
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_rectangle(double a, double b, struct FdKernel **out);

/**
 * Wave-equation kernel observed on `[a, b]`, `0 < a <= b < 1`.
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_wave(double a, double b, struct FdKernel **out);

/**
 * Normalised boxcar kernel observed on `[a, b]`, `0 < a <= b`.
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_boxcar(double a, double b, struct FdKernel **out);

/**
 * Identity blur (direct denoising).
 *
 * # Safety
 * `out` must be a valid pointer to a kernel-handle slot.
 */
enum FdStatus fd_kernel_delta(struct FdKernel **out);

/**
 * Releases a kernel handle. Null is a no-op.
 *
 * # Safety
 * `kernel` must have come from an `fd_kernel_*` constructor and not have
 * been freed already.
 */
void fd_kernel_free(struct FdKernel *kernel);

/**
 * Kernel energy `tau_kappa(m)` (`kappa` in {1, 2}).
 *
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum FdStatus fd_kernel_tau(const struct FdKernel *kernel, uint8_t kappa, int64_t m, double *out);

/**
 * `ln Delta_kappa(j)` of the kernel over the level-`j` wavelet band;
 * `basis_j_max` bounds the tabulated levels.
 *
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum FdStatus fd_kernel_log_delta_stat(const struct FdKernel *kernel,
                                       uint8_t kappa,
                                       uint32_t j,
                                       uint32_t basis_j_max,
                                       double *out);

/**
 * Theoretical convergence-rate prediction for a Besov ball
 * `B^s_{p,q}(radius)` and a kernel with decay `(nu, alpha, beta)`.
 * The risk decays like `n^{-exponent}` (or `(ln n)^{-exponent}` in the
 * super-smooth case), times `(ln n)^{rho1}`.
 *
 * # Safety
 * The three output pointers must be writable.
 */
enum FdStatus fd_predict_rate(double s,
                              double p,
                              double q,
                              double radius,
                              double nu,
                              double alpha,
                              double beta,
                              enum FdRateCase *out_case,
                              double *out_exponent,
                              double *out_rho1);

/**
 * One-shot continuous-model estimation.
 *
 * `fhat_re`/`fhat_im` hold the observed coefficient statistics for
 * `m = -mmax ..= mmax`. The block-thresholded estimate is written into
 * `out_re`/`out_im` (capacity `2 * out_capacity_mmax + 1` each); the actual
 * half-bandwidth is stored in `out_mmax`. Pass `d < 0` for the regime's
 * default threshold constant.
 *
 * # Safety
 * All array pointers must reference buffers of the stated lengths.
 */
enum FdStatus fd_estimate_continuous(const struct FdKernel *kernel,
                                     double n,
                                     enum FdRegime regime,
                                     double d,
                                     const double *fhat_re,
                                     const double *fhat_im,
                                     int64_t mmax,
                                     double *out_re,
                                     double *out_im,
                                     int64_t out_capacity_mmax,
                                     int64_t *out_mmax);

/**
 * Draws one continuous-model observation of the given truth coefficients
 * and writes the statistic into `out_re`/`out_im` (length `2 * mmax + 1`).
 *
 * # Safety
 * All array pointers must reference buffers of length `2 * mmax + 1`.
 */
enum FdStatus fd_simulate_continuous(const struct FdKernel *kernel,
                                     double n,
                                     uint64_t master_seed,
                                     uint64_t stream,
                                     const double *truth_re,
                                     const double *truth_im,
                                     int64_t mmax,
                                     double *out_re,
                                     double *out_im);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FUNDECONV_H */
