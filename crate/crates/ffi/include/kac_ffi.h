#ifndef KAC_FFI_H
#define KAC_FFI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KacStatus {
  KAC_STATUS_OK = 0,
  KAC_STATUS_INVALID_PARAMETER = 1,
  KAC_STATUS_NULL_POINTER = 2,
  KAC_STATUS_BUFFER_TOO_SMALL = 3,
  /**
   * Assembly mismatch, integration failure or another numerical error.
   */
  KAC_STATUS_NUMERICAL = 4,
  /**
   * Both rates are zero.
   */
  KAC_STATUS_NO_EVENTS = 5,
  KAC_STATUS_PANIC = 6,
} KacStatus;

/**
 * Replicated particle system.
 */
typedef struct KacEnsemble KacEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *kac_last_error(void);

/**
 * Create `replicas` copies of an `n`-particle system with independent
 * Gaussian velocities of variance `temperature`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum KacStatus kac_ensemble_new(uintptr_t n,
                                double lambda,
                                double mu,
                                double beta,
                                double temperature,
                                uintptr_t replicas,
                                uint64_t seed,
                                struct KacEnsemble **out);

/**
 * # Safety
 * `ens` must come from [`kac_ensemble_new`] and not be used afterwards.
 */
void kac_ensemble_free(struct KacEnsemble *ens);

/**
 * Advance every replica to absolute time `t`.
 *
 * # Safety
 * `ens` must be a live ensemble.
 */
enum KacStatus kac_ensemble_advance(struct KacEnsemble *ens, double t);

/**
 * # Safety
 * `ens` must be a live ensemble and `out` writable.
 */
enum KacStatus kac_ensemble_time(const struct KacEnsemble *ens, double *out);

/**
 * Replica-averaged total kinetic energy and its standard error.
 *
 * # Safety
 * `ens` must be a live ensemble; `mean` and `stderr` writable.
 */
enum KacStatus kac_ensemble_kinetic_energy(const struct KacEnsemble *ens,
                                           double *mean,
                                           double *stderr);

/**
 * One-particle moments `E[v^k]`, `k = 1..=len`, pooled over particles and
 * replicas. `len` may not exceed 6.
 *
 * # Safety
 * `ens` must be a live ensemble and `out` valid for `len` writes.
 */
enum KacStatus kac_ensemble_moments(const struct KacEnsemble *ens, double *out, uintptr_t len);

/**
 * Smallest nonzero eigenvalue of the generator on the even symmetric sectors.
 *
 * # Safety
 * `out` must be writable.
 */
enum KacStatus kac_first_gap(uintptr_t n, double lambda, double mu, double beta, double *out);

/**
 * Second gap by the quadratic route, cross-checked against the matrix and
 * assembled routes. `upper` receives the other root and may be null.
 *
 * # Safety
 * `out` must be writable; `upper` null or writable.
 */
enum KacStatus kac_second_gap(uintptr_t n,
                              double lambda,
                              double mu,
                              double beta,
                              double *out,
                              double *upper);

/**
 * `min(lambda / 2 + 5 mu / 8, mu)`.
 */
double kac_second_gap_limit(double lambda, double mu);

/**
 * Integrate the moment hierarchy from `m0[0..=order]` (with `m0[0] = 1`)
 * and write `steps + 1` rows of `order + 1` moments, spaced `horizon / steps`
 * apart, into `out`.
 *
 * # Safety
 * `m0` must hold `order + 1` values and `out` must hold `out_len` values.
 */
enum KacStatus kac_integrate_moments(const double *m0,
                                     uintptr_t order,
                                     double lambda,
                                     double mu,
                                     double beta,
                                     double horizon,
                                     uintptr_t steps,
                                     double *out,
                                     uintptr_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAC_FFI_H */
