#ifndef HKCCE_H
#define HKCCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HkcceStatus {
  HKCCE_STATUS_OK = 0,
  HKCCE_STATUS_NULL_POINTER = 1,
  HKCCE_STATUS_DOMAIN = 2,
  HKCCE_STATUS_NUMERICAL = 3,
  HKCCE_STATUS_CONSISTENCY = 4,
  HKCCE_STATUS_CONFIG = 5,
  HKCCE_STATUS_INTERNAL = 6,
} HkcceStatus;

typedef enum HkcceVerdict {
  HKCCE_VERDICT_EQUALITY = 0,
  HKCCE_VERDICT_STRICT = 1,
  HKCCE_VERDICT_INCONCLUSIVE = 2,
  HKCCE_VERDICT_FAIL = 3,
} HkcceVerdict;

/**
 * Opaque solved scattering problem.
 */
typedef struct HkcceScattering HkcceScattering;

/**
 * Flat copy of a verification report. Remainders are 0 when absent.
 */
typedef struct HkcceReport {
  double lhs;
  double rhs;
  double gap;
  double err_est;
  double remainder_1;
  double remainder_2;
  enum HkcceVerdict verdict;
} HkcceReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *hkcce_last_error_message(void);

/**
 * Static version string.
 */
const char *hkcce_version(void);

/**
 * # Safety
 * `out` must be valid for writing one `double`.
 */
enum HkcceStatus hkcce_gamma(double x, double *out);

/**
 * # Safety
 * `out` must be valid for writing one `double`.
 */
enum HkcceStatus hkcce_d_gamma(double gamma, double *out);

/**
 * # Safety
 * `out` must be valid for writing one `double`.
 */
enum HkcceStatus hkcce_hk_constant(uint32_t n, double gamma, double *out);

/**
 * Closed-form Q-curvature of the round boundary.
 *
 * # Safety
 * `out` must be valid for writing one `double`.
 */
enum HkcceStatus hkcce_sphere_q_oracle(uint32_t n, double gamma, double k, double *out);

/**
 * Solve the scattering problem. `ode_tol <= 0` or `t_max <= 0` select the
 * defaults. Free the handle with `hkcce_scattering_free`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum HkcceStatus hkcce_scattering_solve(uint32_t n,
                                        double gamma,
                                        double k,
                                        double ode_tol,
                                        double t_max,
                                        struct HkcceScattering **out);

/**
 * # Safety
 * `h` must come from `hkcce_scattering_solve`; `out` must be writable.
 */
enum HkcceStatus hkcce_scattering_q(const struct HkcceScattering *h, double *out);

/**
 * The scattering value `S(s)1 = c2/c1`.
 *
 * # Safety
 * `h` must come from `hkcce_scattering_solve`; `out` must be writable.
 */
enum HkcceStatus hkcce_scattering_value(const struct HkcceScattering *h, double *out);

/**
 * Accepts null.
 *
 * # Safety
 * `h` must be null or come from `hkcce_scattering_solve`, and not be used again.
 */
void hkcce_scattering_free(struct HkcceScattering *h);

/**
 * Adapted inequality. `tol <= 0` selects the default 1e-6.
 *
 * # Safety
 * `out` must be valid for writing one `HkcceReport`.
 */
enum HkcceStatus hkcce_verify_adapted(uint32_t n,
                                      double gamma,
                                      double k,
                                      double tol,
                                      struct HkcceReport *out);

/**
 * # Safety
 * `out` must be valid for writing one `HkcceReport`.
 */
enum HkcceStatus hkcce_verify_cla(uint32_t n, double k, double tol, struct HkcceReport *out);

/**
 * # Safety
 * `out` must be valid for writing one `HkcceReport`.
 */
enum HkcceStatus hkcce_verify_lee(uint32_t n, double k, double tol, struct HkcceReport *out);

/**
 * Defect identity of the adapted compactification.
 *
 * # Safety
 * `out` must be valid for writing one `HkcceReport`.
 */
enum HkcceStatus hkcce_defect_adapted(uint32_t n,
                                      double gamma,
                                      double k,
                                      double tol,
                                      struct HkcceReport *out);

/**
 * # Safety
 * `out` must be valid for writing one `HkcceReport`.
 */
enum HkcceStatus hkcce_defect_lee(uint32_t n, double k, double tol, struct HkcceReport *out);

/**
 * Exact certificate for the `r^4` boundary expansion as a JSON string.
 * Free it with `hkcce_string_free`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum HkcceStatus hkcce_prop21_json(uint32_t n, char **out);

/**
 * Accepts null.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hkcce_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HKCCE_H */
