#ifndef COVLAB_H
#define COVLAB_H

/* Generated by cbindgen from covlab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Call outcome. `COVLAB_STATUS_INVALID` and `COVLAB_STATUS_RUNTIME` match
 * the CLI's exit codes for the same failure classes.
 */
typedef enum covlab_status {
  COVLAB_STATUS_OK = 0,
  /**
   * A parameter or config failed validation; details via
   * `covlab_last_error_message`.
   */
  COVLAB_STATUS_INVALID = 2,
  /**
   * The operation itself failed (I/O, unsupported combination, internal
   * panic).
   */
  COVLAB_STATUS_RUNTIME = 3,
  /**
   * A required pointer argument was null.
   */
  COVLAB_STATUS_NULL_ARG = 4,
} covlab_status;

/**
 * Opaque radius distribution handle.
 */
typedef struct covlab_dist covlab_dist;

/**
 * Opaque two-state chain spec handle.
 */
typedef struct covlab_markov covlab_markov;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *covlab_version(void);

/**
 * Message for the most recent failure on this thread. Borrowed; valid until
 * the next failing covlab call on the same thread. Never null.
 */
const char *covlab_last_error_message(void);

/**
 * Release a string obtained through a `char**` output parameter. Passing
 * null is a no-op.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library through a
 * `char**` output, not yet freed.
 */
void covlab_string_free(char *s);

/**
 * Parse a radius distribution from its text form — the same grammar the
 * config files use, e.g. `degenerate(1)`, `bounded-uniform(0,2)`,
 * `pareto-tail(2.0)`, `heavy(0.5)`, `discrete-pareto(2.0)`,
 * `discrete-table((1,0.4),(3,0.6))`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 * On `COVLAB_STATUS_OK`, `*out` owns the handle until `covlab_dist_free`.
 */
enum covlab_status covlab_dist_parse(const char *text, struct covlab_dist **out);

/**
 * Release a distribution handle. Passing null is a no-op.
 *
 * # Safety
 * `dist` must come from `covlab_dist_parse` and not be used afterwards.
 */
void covlab_dist_free(struct covlab_dist *dist);

/**
 * Canonical text form of the distribution; caller frees via
 * `covlab_string_free`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_dist_canonical(const struct covlab_dist *dist, char **out);

/**
 * Strict tail `P(rho > x)`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_dist_tail(const struct covlab_dist *dist, double x, double *out);

/**
 * Weak tail `P(rho >= x)`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_dist_prob_geq(const struct covlab_dist *dist, double x, double *out);

/**
 * Tail regime `liminf`/`limsup` of `x * P(rho > x)`; infinite limits are
 * reported as C `INFINITY`.
 *
 * # Safety
 * `dist` must be a live handle; `liminf`/`limsup` must be valid pointers.
 */
enum covlab_status covlab_dist_tail_regime(const struct covlab_dist *dist,
                                           double *liminf,
                                           double *limsup);

/**
 * `E[rho^d]`; infinite moments are reported as C `INFINITY`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_dist_moment(const struct covlab_dist *dist, uint32_t d, double *out);

/**
 * Fill `out[0..n]` with draws from the stream `(seed, stream_index)` —
 * deterministic and independent across distinct indices.
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to at least `n` doubles.
 */
enum covlab_status covlab_dist_sample_n(const struct covlab_dist *dist,
                                        uint64_t seed,
                                        uint64_t stream_index,
                                        size_t n,
                                        double *out);

/**
 * Exact expected vacancy fraction of the Poisson cube model on the unit
 * window: `exp(-intensity * E[rho^dim])`.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_vacancy_exact(double intensity,
                                        size_t dim,
                                        const struct covlab_dist *rho,
                                        double *out);

/**
 * Critical intensity scale for balls of radius `r` (`r >= e`) at rate
 * `lambda` in dimension `d`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum covlab_status covlab_critical_scale(double r, double lambda, size_t d, double *out);

/**
 * Exact probability that planar quadrant site `(i, j)` is uncovered, by
 * full enumeration.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_lattice_uncovered_oracle(double p,
                                                   const struct covlab_dist *rho,
                                                   uint64_t i,
                                                   uint64_t j,
                                                   double *out);

/**
 * Same probability through the closed-form product.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_lattice_uncovered_formula(double p,
                                                    const struct covlab_dist *rho,
                                                    uint64_t i,
                                                    uint64_t j,
                                                    double *out);

/**
 * Ratio-test classification of a positive series from its consecutive
 * terms: `*class_out` is -1 (diverges), 0 (indeterminate), or +1
 * (converges); `*fitted_c` is the fitted exponent, NaN when unavailable.
 *
 * # Safety
 * `terms` must point to `n_terms` doubles; `fitted_c` and `class_out` must
 * be valid pointers.
 */
enum covlab_status covlab_gauss_ratio_test(const double *terms,
                                           size_t n_terms,
                                           uint64_t m_start,
                                           double *fitted_c,
                                           int *class_out);

/**
 * Build a chain spec handle. `initial` selects the start law: 0 stationary,
 * 1 start at state 0, 2 start at state 1.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be a valid pointer. On
 * `COVLAB_STATUS_OK`, `*out` owns the handle until `covlab_markov_free`.
 */
enum covlab_status covlab_markov_new(double p00,
                                     double p01,
                                     double p10,
                                     double p11,
                                     const struct covlab_dist *rho,
                                     int initial,
                                     struct covlab_markov **out);

/**
 * Release a chain handle. Passing null is a no-op.
 *
 * # Safety
 * `chain` must come from `covlab_markov_new` and not be used afterwards.
 */
void covlab_markov_free(struct covlab_markov *chain);

/**
 * Exact uncovered probabilities for target site `k >= 1`: from state 0,
 * from state 1, and from the spec's initial law.
 *
 * # Safety
 * `chain` must be a live handle; `p0`, `p1`, `p_init` must be valid
 * pointers.
 */
enum covlab_status covlab_markov_uncovered_prob(const struct covlab_markov *chain,
                                                uint64_t k,
                                                double *p0,
                                                double *p1,
                                                double *p_init);

/**
 * Almost-sure coverage classification: `*class_out` is +1 (covers), -1
 * (does not cover), or 0 (indeterminate); also reports the stationary open
 * fraction and the tail regime (infinite limits as C `INFINITY`).
 *
 * # Safety
 * `chain` must be a live handle; the three out-pointers must be valid.
 */
enum covlab_status covlab_markov_classify(const struct covlab_markov *chain,
                                          double *open_fraction,
                                          double *tail_liminf,
                                          double *tail_limsup,
                                          int *class_out);

/**
 * Weight `E` of the `1/(1-s)` pole of the uncovered-probability generating
 * function under tail constant `c`; its sign decides the coverage
 * threshold.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be a valid pointer.
 */
enum covlab_status covlab_markov_pole_weight(const struct covlab_markov *chain,
                                             double c,
                                             double *out);

/**
 * Parse experiment config text (same grammar as the CLI's files), run it,
 * and hand back the JSON summary. The config's `out` path and `format` are
 * ignored — nothing is written to disk. Caller frees `*json_out` via
 * `covlab_string_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `json_out` must be a valid
 * pointer.
 */
enum covlab_status covlab_run_config(const char *text, char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVLAB_H */
