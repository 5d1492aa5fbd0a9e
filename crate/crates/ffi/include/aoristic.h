#ifndef AORISTIC_H
#define AORISTIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum AorStatus {
  AOR_STATUS_OK = 0,
  AOR_STATUS_NULL_POINTER = 1,
  AOR_STATUS_INVALID_ARGUMENT = 2,
  AOR_STATUS_DATA_ERROR = 3,
  AOR_STATUS_NUMERIC_ERROR = 4,
  AOR_STATUS_BUFFER_TOO_SMALL = 5,
  AOR_STATUS_PANIC = 6,
} AorStatus;

/**
 * Observed atoms and intervals on a window.
 */
typedef struct AorObservedData AorObservedData;

/**
 * Output of the posterior sampler.
 */
typedef struct AorPosteriorSample AorPosteriorSample;

/**
 * Area-interaction prior.
 */
typedef struct AorPrior AorPrior;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length excluding the NUL,
 * or 0 when there is none.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes or null.
 */
size_t aor_last_error_message(char *buf, size_t cap);

/**
 * Builds observed data from `n_atoms` atom times and `n_intervals`
 * intervals `[a[i], a[i] + l[i]]` on the window `(lo, hi)`.
 *
 * # Safety
 * Array arguments must be valid for their stated lengths; `out` must be a
 * valid pointer.
 */
enum AorStatus aor_observed_new(const double *atoms,
                                size_t n_atoms,
                                const double *a,
                                const double *l,
                                size_t n_intervals,
                                double lo,
                                double hi,
                                struct AorObservedData **out);

/**
 * # Safety
 * `data` must come from [`aor_observed_new`] and not be used afterwards.
 */
void aor_observed_free(struct AorObservedData *data);

/**
 * Number of observations `n` and of atoms `m`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AorStatus aor_observed_counts(const struct AorObservedData *data, size_t *n, size_t *m);

/**
 * Atom fraction `m / n`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AorStatus aor_estimate_atom_prob(const struct AorObservedData *data, double *out);

/**
 * Area-interaction prior with intensity `beta`, interaction `eta`, radius
 * `r` on the window `(lo, hi)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AorStatus aor_prior_new(double beta,
                             double eta,
                             double r,
                             double lo,
                             double hi,
                             struct AorPrior **out);

/**
 * # Safety
 * `prior` must come from [`aor_prior_new`] and not be used afterwards.
 */
void aor_prior_free(struct AorPrior *prior);

/**
 * Unnormalised log density of the pattern `points[0..n]`.
 *
 * # Safety
 * `points` must be valid for `n` values; `out` must be valid.
 */
enum AorStatus aor_prior_log_density(const struct AorPrior *prior,
                                     const double *points,
                                     size_t n,
                                     double *out);

/**
 * Perfect draw from the prior; points are written in ascending order.
 *
 * # Safety
 * `buf` must be valid for `cap` values; `out_len` must be valid.
 */
enum AorStatus aor_prior_sample_cftp(const struct AorPrior *prior,
                                     uint64_t seed,
                                     double *buf,
                                     size_t cap,
                                     size_t *out_len);

/**
 * Runs the single-site Metropolis–Hastings sampler for the latent times.
 *
 * # Safety
 * Handles must be valid; `out` must be a valid pointer.
 */
enum AorStatus aor_posterior_run(const struct AorObservedData *data,
                                 const struct AorPrior *prior,
                                 size_t burnin,
                                 size_t sweeps,
                                 size_t thin,
                                 uint64_t seed,
                                 struct AorPosteriorSample **out);

/**
 * # Safety
 * `sample` must come from [`aor_posterior_run`] and not be used afterwards.
 */
void aor_posterior_free(struct AorPosteriorSample *sample);

/**
 * Number of recorded states.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AorStatus aor_posterior_len(const struct AorPosteriorSample *sample, size_t *out);

/**
 * Number of latent times per state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AorStatus aor_posterior_dim(const struct AorPosteriorSample *sample, size_t *out);

/**
 * Fraction of accepted proposals.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AorStatus aor_posterior_acceptance_rate(const struct AorPosteriorSample *sample, double *out);

/**
 * Copies recorded state `index` (one value per interval, in data order).
 *
 * # Safety
 * `buf` must be valid for `cap` values; other pointers must be valid.
 */
enum AorStatus aor_posterior_copy_state(const struct AorPosteriorSample *sample,
                                        size_t index,
                                        double *buf,
                                        size_t cap,
                                        size_t *out_len);

/**
 * Fits the Y-phase Gamma law from observed interval lengths.
 *
 * # Safety
 * `lengths` must be valid for `n` values; outputs must be valid.
 */
enum AorStatus aor_fit_gamma_lengths(const double *lengths, size_t n, double *shape, double *rate);

/**
 * Number of ways to assign `k` points to `k` intervals `[a[i], a[i]+l[i]]`
 * with every point inside its interval.
 *
 * # Safety
 * Arrays must be valid for `k` values; `out` must be valid.
 */
enum AorStatus aor_count_valid_assignments(const double *points,
                                           const double *a,
                                           const double *l,
                                           size_t k,
                                           uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AORISTIC_H */
