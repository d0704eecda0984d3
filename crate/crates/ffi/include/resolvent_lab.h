#ifndef RESOLVENT_LAB_H
#define RESOLVENT_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  // Parameter outside the domain of the law or operation.
  RL_STATUS_INVALID_ARGUMENT = 2,
  // Too few values for the requested statistic.
  RL_STATUS_INSUFFICIENT_DATA = 3,
  // Matrix draws were rejected beyond the retry budget.
  RL_STATUS_PARTIAL = 4,
  RL_STATUS_UNSUPPORTED = 5,
  // Numerical failure (degenerate spectrum, quadrature did not converge).
  RL_STATUS_NUMERICAL = 6,
  // A Rust panic was caught at the boundary.
  RL_STATUS_INTERNAL = 7,
} RlStatus;

// Random matrix ensembles for [`rl_sample_matrix`].
typedef enum RlEnsemble {
  RL_ENSEMBLE_GINIBRE = 0,
  // Elliptic Ginibre; uses `tau`.
  RL_ENSEMBLE_GINUE = 1,
  RL_ENSEMBLE_HAAR_UNITARY = 2,
  // GinUE(tau) x Haar x Ginibre.
  RL_ENSEMBLE_PRODUCT = 3,
  RL_ENSEMBLE_GUE = 4,
} RlEnsemble;

// Statistic computed from each matrix draw.
typedef enum RlStatistic {
  // `[(z - M)^{-1}]_{11}`.
  RL_STATISTIC_G11 = 0,
  // `(1/N) tr (z - M)^{-1}`.
  RL_STATISTIC_TRACE = 1,
} RlStatistic;

// Regimes with a known tail amplitude.
typedef enum RlTailRegime {
  // `param` is `|z| < 1`.
  RL_TAIL_REGIME_BULK = 0,
  RL_TAIL_REGIME_CRITICAL = 1,
  // `param` is `alpha`.
  RL_TAIL_REGIME_EDGE = 2,
  // `param` is the rescaled overlap.
  RL_TAIL_REGIME_CONJECTURE = 3,
} RlTailRegime;

// Opaque batch of complex samples.
typedef struct RlBatch RlBatch;

// Opaque probability law.
typedef struct RlModel RlModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *rl_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rl_version(void);

// Exact finite-N law of the variance parameter at `|z| = r`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_finite_n(size_t n, double r, struct RlModel **dst);

// `u^{-2} e^{-1/u}`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_regime1(struct RlModel **dst);

// Limit law in the critical window.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_regime2(struct RlModel **dst);

// Edge-window limit law with offset `alpha`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_regime3(double alpha, struct RlModel **dst);

// Complex Student law `(1/π) β / (β + |ω - c|²)²`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_student(double beta,
                               double center_re,
                               double center_im,
                               struct RlModel **dst);

// Circular complex Gaussian with `E|ω - mean|² = variance`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_gaussian(double mean_re,
                                double mean_im,
                                double variance,
                                struct RlModel **dst);

// Inverse-gamma law with shape `nu` and scale `beta`.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_inverse_gamma(double nu, double beta, struct RlModel **dst);

// Real Cauchy law.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_model_cauchy(double location, double scale, struct RlModel **dst);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from an `rl_model_*` constructor and not be used afterwards.
void rl_model_free(struct RlModel *model);

// Nonzero for laws on the complex plane.
//
// # Safety
// `model` must be a live handle.
enum RlStatus rl_model_is_complex(const struct RlModel *model, int32_t *dst);

// Density of a real law at `x`.
//
// # Safety
// `model` must be a live handle; `dst` must be writable.
enum RlStatus rl_model_pdf(const struct RlModel *model, double x, double *dst);

// Density of a complex law at `re + i im`.
//
// # Safety
// `model` must be a live handle; `dst` must be writable.
enum RlStatus rl_model_pdf_complex(const struct RlModel *model, double re, double im, double *dst);

// CDF of a real law at `x`.
//
// # Safety
// `model` must be a live handle; `dst` must be writable.
enum RlStatus rl_model_cdf(const struct RlModel *model, double x, double *dst);

// Radial CDF `P(|W - center| <= r)` of a complex law.
//
// # Safety
// `model` must be a live handle; `dst` must be writable.
enum RlStatus rl_model_radial_cdf(const struct RlModel *model, double r, double *dst);

// `count` i.i.d. draws; real laws have zero imaginary parts.
//
// # Safety
// `model` must be a live handle; `dst` must be writable.
enum RlStatus rl_model_sample(const struct RlModel *model,
                              size_t count,
                              uint64_t seed,
                              struct RlBatch **dst);

// Matrix draws of a resolvent statistic at `z`. `ensemble` is an
// [`RlEnsemble`] and `statistic` an [`RlStatistic`]; `tau` is used by
// `Ginue` and `Product` only.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_sample_matrix(uint32_t ensemble,
                               size_t n,
                               double tau,
                               uint32_t statistic,
                               double z_re,
                               double z_im,
                               size_t count,
                               uint64_t seed,
                               size_t workers,
                               struct RlBatch **dst);

// Exact Ginibre `[G]_{11}` draws without matrices.
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_sample_g11_exact(size_t n,
                                  double z_re,
                                  double z_im,
                                  size_t count,
                                  uint64_t seed,
                                  struct RlBatch **dst);

// Releases a batch. Null is ignored.
//
// # Safety
// `batch` must come from a sampling call and not be used afterwards.
void rl_batch_free(struct RlBatch *batch);

// Number of values in the batch.
//
// # Safety
// `batch` must be a live handle.
enum RlStatus rl_batch_len(const struct RlBatch *batch, size_t *dst);

// Copies up to `capacity` values into `re` and `im` (either may be null)
// and writes the number copied to `written`.
//
// # Safety
// Non-null `re`/`im` must have room for `capacity` doubles.
enum RlStatus rl_batch_values(const struct RlBatch *batch,
                              double *re,
                              double *im,
                              size_t capacity,
                              size_t *written);

// Draws rejected and resampled while filling the batch.
//
// # Safety
// `batch` must be a live handle.
enum RlStatus rl_batch_rejections(const struct RlBatch *batch, size_t *dst);

// Log-log fit of the radial survival function of `|W - center|` over the
// quantile window `[q_lo, q_hi]`. `amplitude` uses the slope pinned at -2.
//
// # Safety
// `batch` must be a live handle; `slope`/`amplitude` must be writable.
enum RlStatus rl_batch_tail_fit(const struct RlBatch *batch,
                                double center_re,
                                double center_im,
                                double q_lo,
                                double q_hi,
                                double *slope,
                                double *amplitude);

// KS distance of `|W - center|` against a complex model's radial CDF, or of
// the real parts against a real model's CDF.
//
// # Safety
// Handles must be live; `dst` must be writable.
enum RlStatus rl_batch_ks_model(const struct RlBatch *batch,
                                const struct RlModel *model,
                                double *dst);

// Two-sample KS distance between two arrays.
//
// # Safety
// `a` and `b` must point to `na` and `nb` doubles.
enum RlStatus rl_ks_two_sample(const double *a, size_t na, const double *b, size_t nb, double *dst);

// Coefficient `A` of `P(|W| >= G) ~ A / G^2`; `regime` is an [`RlTailRegime`].
//
// # Safety
// `dst` must be writable.
enum RlStatus rl_tail_amplitude(uint32_t regime, double param, double *dst);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESOLVENT_LAB_H */
