/* C interface to the tabdev deviation-test library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TabdevStatus {
  TABDEV_STATUS_OK = 0,
  TABDEV_STATUS_NULL_POINTER = 1,
  TABDEV_STATUS_INVALID_ARGUMENT = 2,
  TABDEV_STATUS_DIMENSION_MISMATCH = 3,
  TABDEV_STATUS_DEGENERATE_SCALE = 4,
  TABDEV_STATUS_FACTORIZATION_ERROR = 5,
  TABDEV_STATUS_PARSE_ERROR = 6,
  TABDEV_STATUS_IO_ERROR = 7,
  TABDEV_STATUS_PANIC = 8,
} TabdevStatus;

/**
 * Opaque handle to a finished test run (decision plus trajectory).
 */
typedef struct TabdevTestResult TabdevTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tabdev_version(void);

/**
 * Human-readable description of a status code (static storage).
 */
const char *tabdev_status_message(enum TabdevStatus status);

/**
 * Density of the bandit distribution B(kappa) at `x`.
 *
 * # Safety
 * `out` must be a valid pointer to a writable `double`.
 */
enum TabdevStatus tabdev_bandit_pdf(double x, double kappa, double *out);

/**
 * CDF of B(kappa) at `x`.
 *
 * # Safety
 * `out` must be a valid pointer to a writable `double`.
 */
enum TabdevStatus tabdev_bandit_cdf(double x, double kappa, double *out);

/**
 * Quantile of B(kappa) at `q` in (0,1).
 *
 * # Safety
 * `out` must be a valid pointer to a writable `double`.
 */
enum TabdevStatus tabdev_bandit_quantile(double q, double kappa, double *out);

/**
 * Tail probability g(kappa) = P(|B(-kappa)| > z), `z >= 0`.
 *
 * # Safety
 * `out` must be a valid pointer to a writable `double`.
 */
enum TabdevStatus tabdev_bandit_tail_prob(double kappa, double z, double *out);

/**
 * Fills `out[0..count]` with i.i.d. B(kappa) draws from a seeded stream.
 *
 * # Safety
 * `out` must point to a writable buffer of at least `count` doubles.
 */
enum TabdevStatus tabdev_bandit_sample(double kappa, uint64_t seed, size_t count, double *out);

/**
 * One-sample deviation test of `||mu - mu0|| > d0` on `t x n` row-major
 * `data`. `mu0` may be NULL for the zero reference. On success `*out` owns a
 * new result handle.
 *
 * # Safety
 * `data` must point to `t * n` doubles, `mu0` to `n` doubles when non-NULL,
 * and `out` to a writable handle pointer.
 */
enum TabdevStatus tabdev_one_sample_test(const double *data,
                                         size_t t,
                                         size_t n,
                                         const double *mu0,
                                         double d0,
                                         double alpha,
                                         double split_fraction,
                                         struct TabdevTestResult **out);

/**
 * Two-sample deviation test of `||mu1 - mu2|| > d0`; `x` is `m1 x n`, `z` is
 * `m2 x n`, both row-major. `n0 = 0` selects the default TAB-phase length
 * (a third of the smaller group).
 *
 * # Safety
 * `x` must point to `m1 * n` doubles, `z` to `m2 * n` doubles, and `out` to
 * a writable handle pointer.
 */
enum TabdevStatus tabdev_two_sample_test(const double *x,
                                         size_t m1,
                                         const double *z,
                                         size_t m2,
                                         size_t n,
                                         double d0,
                                         double alpha,
                                         size_t n0,
                                         struct TabdevTestResult **out);

/**
 * 1 if the deviation hypothesis was rejected, 0 if not, -1 on NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from a `tabdev_*_test` call.
 */
int32_t tabdev_result_reject(const struct TabdevTestResult *result);

/**
 * Estimated mean of the target variables; NaN on NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from a `tabdev_*_test` call.
 */
double tabdev_result_tau_hat(const struct TabdevTestResult *result);

/**
 * Estimated variance of the target variables; NaN on NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from a `tabdev_*_test` call.
 */
double tabdev_result_sigma2_hat(const struct TabdevTestResult *result);

/**
 * Number of TAB steps (the trajectory length); 0 on NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from a `tabdev_*_test` call.
 */
size_t tabdev_result_len(const struct TabdevTestResult *result);

/**
 * Copies the partial statistics `M_1..M_T2` into `buf[0..len]`; `len` must
 * equal `tabdev_result_len`.
 *
 * # Safety
 * `result` must be a live handle and `buf` must point to `len` writable
 * doubles.
 */
enum TabdevStatus tabdev_result_trajectory(const struct TabdevTestResult *result,
                                           double *buf,
                                           size_t len);

/**
 * Releases a result handle; NULL is a no-op.
 *
 * # Safety
 * `result` must be NULL or a handle not previously freed.
 */
void tabdev_result_free(struct TabdevTestResult *result);

/**
 * One-sample drift parameter kappa for population `(mu, sigma)` (`sigma` is
 * `n x n` row-major); the limiting law of the statistic is B(-kappa).
 *
 * # Safety
 * `mu` must point to `n` doubles, `sigma` to `n * n` doubles, `out` to a
 * writable `double`.
 */
enum TabdevStatus tabdev_kappa_one_sample(const double *mu,
                                          size_t n,
                                          const double *sigma,
                                          double d0,
                                          size_t t1,
                                          size_t t2,
                                          double *out);

/**
 * Predicted rejection probability `g(kappa)` at significance `alpha`.
 *
 * # Safety
 * `out` must be a valid pointer to a writable `double`.
 */
enum TabdevStatus tabdev_theoretical_rejection_prob(double kappa, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
