#ifndef ERSS_EXTROPY_H
#define ERSS_EXTROPY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum ErssStatus {
  ERSS_STATUS_OK = 0,
  ERSS_STATUS_NULL_POINTER = 1,
  ERSS_STATUS_INVALID_STRING = 2,
  ERSS_STATUS_PARAMETER_DOMAIN = 3,
  ERSS_STATUS_DOMAIN = 4,
  ERSS_STATUS_EVALUATION = 5,
  ERSS_STATUS_INSUFFICIENT_DATA = 6,
  ERSS_STATUS_DEGENERATE_RATIO = 7,
  ERSS_STATUS_NOT_APPLICABLE = 8,
  ERSS_STATUS_PANIC = 99,
} ErssStatus;

// How a value was obtained.
typedef enum ErssMethod {
  ERSS_METHOD_CLOSED_FORM = 0,
  ERSS_METHOD_QUANTILE_QUADRATURE = 1,
  ERSS_METHOD_DENSITY_QUADRATURE = 2,
  ERSS_METHOD_MONTE_CARLO = 3,
} ErssMethod;

// Opaque distribution handle.
typedef struct ErssDistribution ErssDistribution;

// Opaque engine handle holding the quadrature tolerances.
typedef struct ErssEngine ErssEngine;

// Opaque weight handle.
typedef struct ErssWeight ErssWeight;

// A GWE value with its error estimate.
typedef struct ErssResult {
  double value;
  double error_estimate;
  bool converged;
  enum ErssMethod method;
} ErssResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length in bytes, excluding the
// terminator; pass a null `buf` to query it.
//
// # Safety
// `buf` must be null or point to at least `len` writable bytes.
size_t erss_last_error_message(char *buf, size_t len);

// Static NUL-terminated version string.
const char *erss_version(void);

// Power distribution F(x) = x^θ on [0, 1].
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_dist_power(double theta, struct ErssDistribution **out);

// Exponential distribution with the given rate.
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_dist_exponential(double rate, struct ErssDistribution **out);

// Pareto distribution F(x) = 1 − x^{−α} on [1, ∞).
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_dist_pareto(double shape, struct ErssDistribution **out);

// Uniform distribution on [lower, upper].
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_dist_uniform(double lower, double upper, struct ErssDistribution **out);

// Parses a distribution spec as accepted by the command line, e.g.
// `"exponential:2"` or `"triangular_up@-0.5"`.
//
// # Safety
// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
enum ErssStatus erss_dist_parse(const char *spec, struct ErssDistribution **out);

// Releases a distribution handle. Null is ignored.
//
// # Safety
// `dist` must be null or a handle not yet freed.
void erss_dist_free(struct ErssDistribution *dist);

// Density at `x`.
//
// # Safety
// `dist` and `out` must be valid pointers.
enum ErssStatus erss_dist_pdf(const struct ErssDistribution *dist, double x, double *out);

// Distribution function at `x`.
//
// # Safety
// `dist` and `out` must be valid pointers.
enum ErssStatus erss_dist_cdf(const struct ErssDistribution *dist, double x, double *out);

// Quantile at `u` in [0, 1].
//
// # Safety
// `dist` and `out` must be valid pointers.
enum ErssStatus erss_dist_quantile(const struct ErssDistribution *dist, double u, double *out);

// Weight w(x) = x^m.
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_weight_power(double m, struct ErssWeight **out);

// Releases a weight handle. Null is ignored.
//
// # Safety
// `weight` must be null or a handle not yet freed.
void erss_weight_free(struct ErssWeight *weight);

// Engine with the given absolute and relative quadrature tolerances.
// Non-positive values select the defaults.
//
// # Safety
// `out` must be a valid pointer.
enum ErssStatus erss_engine_new(double abs_tol, double rel_tol, struct ErssEngine **out);

// Releases an engine handle. Null is ignored.
//
// # Safety
// `engine` must be null or a handle not yet freed.
void erss_engine_free(struct ErssEngine *engine);

// Weighted extropy J^w of a single observation.
//
// # Safety
// All pointers must be valid.
enum ErssStatus erss_weighted_extropy(const struct ErssEngine *engine,
                                      const struct ErssDistribution *dist,
                                      const struct ErssWeight *weight,
                                      struct ErssResult *out);

// GWE of an SRS of size `n`.
//
// # Safety
// All pointers must be valid.
enum ErssStatus erss_gwe_srs(const struct ErssEngine *engine,
                             const struct ErssDistribution *dist,
                             const struct ErssWeight *weight,
                             uint32_t n,
                             struct ErssResult *out);

// GWE of an ERSS of size `n` through Beta expectations of Λ.
//
// # Safety
// All pointers must be valid.
enum ErssStatus erss_gwe_erss_quantile(const struct ErssEngine *engine,
                                       const struct ErssDistribution *dist,
                                       const struct ErssWeight *weight,
                                       uint32_t n,
                                       struct ErssResult *out);

// GWE of an ERSS of size `n` from squared order-statistic densities.
//
// # Safety
// All pointers must be valid.
enum ErssStatus erss_gwe_erss_direct(const struct ErssEngine *engine,
                                     const struct ErssDistribution *dist,
                                     const struct ErssWeight *weight,
                                     uint32_t n,
                                     struct ErssResult *out);

// Closed-form ERSS GWE for the power, exponential and Pareto families with a
// power weight. Other inputs return `ERSS_STATUS_NOT_APPLICABLE`.
//
// # Safety
// All pointers must be valid.
enum ErssStatus erss_gwe_erss_closed_form(const struct ErssEngine *engine,
                                          const struct ErssDistribution *dist,
                                          const struct ErssWeight *weight,
                                          uint32_t n,
                                          struct ErssResult *out);

// The ERSS constants Q₁ and Q₂ for size `n`. Either output may be null.
//
// # Safety
// Non-null outputs must be valid pointers.
enum ErssStatus erss_q_constants(uint32_t n, double *q1, double *q2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERSS_EXTROPY_H */
