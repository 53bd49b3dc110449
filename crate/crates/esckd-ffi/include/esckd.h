#ifndef ESCKD_H
#define ESCKD_H

/* Generated by cbindgen from esckd-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  EsckdStatus_Ok = 0,
  /**
   * A parameter was outside its domain or inconsistent with the handle.
   */
  EsckdStatus_InvalidArgument = 1,
  /**
   * An iterative routine failed to meet its tolerance.
   */
  EsckdStatus_NumericalFailure = 2,
  /**
   * A required pointer was null.
   */
  EsckdStatus_NullPointer = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  EsckdStatus_Utf8Error = 4,
} EsckdStatus;

/**
 * Decoder selection for [`esckd_channel_capacity`].
 */
typedef enum {
  /**
   * The ensemble's own measurement.
   */
  EsckdDecoder_Same = 0,
  /**
   * Measurement of the conjugated ensemble.
   */
  EsckdDecoder_Conjugate = 1,
  /**
   * Qubit antipodal preset.
   */
  EsckdDecoder_BlochInversion = 2,
} EsckdDecoder;

/**
 * Opaque signal ensemble: n unit vectors in a d-dimensional complex space.
 */
typedef struct EsckdEnsemble EsckdEnsemble;

/**
 * Frame diagnostics; see the library documentation for definitions.
 */
typedef struct {
  double v1;
  double v2;
  double target_overlap;
  double max_equiangular_deviation;
  double max_tightness_deviation;
} EsckdFrameReport;

/**
 * Post-sift probabilities of the intercept/resend attack.
 */
typedef struct {
  double p_sift;
  double p_ab;
  double p_ae;
  double p_question;
} EsckdAttackSummary;

/**
 * One-way key-rate bounds in bits per sifted signal.
 */
typedef struct {
  double i_ab;
  double i_ae;
  double i_be;
  double i_e;
  double i_ab_given_e;
} EsckdRateBounds;

/**
 * Critical interception fraction and the equivalent noise rates.
 */
typedef struct {
  double q_star;
  double p_e_star;
  double r_star;
  /**
   * True when the one-way bound stays positive at full interception.
   */
  bool saturated;
} EsckdThreshold;

/**
 * Unbiased-basis threshold and peak rate.
 */
typedef struct {
  double p_e_star;
  double r_star;
  double rate_max;
} EsckdMubThreshold;

/**
 * Empirical quadruple of a simulation run.
 */
typedef struct {
  uint64_t rounds_total;
  uint64_t rounds_sifted;
  double p_sift;
  double p_ab;
  double p_ae;
  double p_question;
} EsckdSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *esckd_last_error_message(void);

/**
 * Builds the regular simplex of d+1 vectors in dimension d.
 *
 * # Safety
 * `out` must be a valid pointer; the returned handle must be released with
 * [`esckd_ensemble_free`].
 */
EsckdStatus esckd_simplex_new(size_t d, EsckdEnsemble **out);

/**
 * Searches numerically for an equiangular frame of n vectors in dimension
 * d. Fails with `NumericalFailure` when no restart reaches `tolerance`.
 *
 * # Safety
 * `out` must be a valid pointer; the returned handle must be released with
 * [`esckd_ensemble_free`].
 */
EsckdStatus esckd_frame_solve(size_t d,
                              size_t n,
                              uint64_t seed,
                              uint32_t restarts,
                              uint32_t max_iterations,
                              double tolerance,
                              EsckdEnsemble **out);

/**
 * Builds k mutually unbiased bases in prime dimension d (k·d vectors).
 *
 * # Safety
 * `out` must be a valid pointer; the returned handle must be released with
 * [`esckd_ensemble_free`].
 */
EsckdStatus esckd_mub_new(size_t d, size_t k, EsckdEnsemble **out);

/**
 * Parses the JSON frame format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid
 * pointer; the returned handle must be released with
 * [`esckd_ensemble_free`].
 */
EsckdStatus esckd_frame_from_json(const char *text, EsckdEnsemble **out);

/**
 * Serializes an ensemble to the JSON frame format (17 significant digits).
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 * The returned string must be released with [`esckd_string_free`].
 */
EsckdStatus esckd_frame_to_json(const EsckdEnsemble *handle, char **out);

/**
 * Releases a string allocated by this library.
 *
 * # Safety
 * `text` must have been returned by this library and not yet freed.
 */
void esckd_string_free(char *text);

/**
 * Releases an ensemble handle.
 *
 * # Safety
 * `handle` must have been returned by this library and not yet freed.
 */
void esckd_ensemble_free(EsckdEnsemble *handle);

/**
 * Dimension d of the ensemble's space; 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live ensemble handle.
 */
size_t esckd_ensemble_dim(const EsckdEnsemble *handle);

/**
 * Number of vectors n; 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live ensemble handle.
 */
size_t esckd_ensemble_size(const EsckdEnsemble *handle);

/**
 * Exact frame diagnostics by direct summation.
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_frame_verify(const EsckdEnsemble *handle, EsckdFrameReport *out);

/**
 * Average measure-and-prepare fidelity d·V₂/n² of a tight ensemble.
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_measure_prepare_fidelity(const EsckdEnsemble *handle, double *out);

/**
 * Noiseless sift probability s/(n(n−1)).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_sift_rate_noiseless(size_t n, size_t d, size_t m, double *out);

/**
 * Noiseless key rate in bits per sifted signal.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_key_rate_noiseless(size_t n, size_t d, size_t m, double *out);

/**
 * Closed-form post-sift probabilities at interception fraction q.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_attack_summary(size_t n, size_t d, size_t m, double q, EsckdAttackSummary *out);

/**
 * Key-rate bounds from the exact post-sift joint distribution.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_rate_bounds(size_t n, size_t d, size_t m, double q, EsckdRateBounds *out);

/**
 * Critical interception fraction and equivalent depolarizing rate.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_threshold(size_t n, size_t d, size_t m, EsckdThreshold *out);

/**
 * Large-d key rate per signal at n = alpha·d.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_asymptotic_rate(size_t d, double alpha, double *out);

/**
 * Unbiased-basis threshold and sift-weighted peak rate.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_mub_threshold(size_t d, size_t k, EsckdMubThreshold *out);

/**
 * Error probability of the unbiased-basis protocol at full interception.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
EsckdStatus esckd_mub_full_intercept_error(size_t d, size_t k, double *out);

/**
 * Mutual information of the ensemble against a fixed decoder.
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_channel_capacity(const EsckdEnsemble *handle, EsckdDecoder decoder, double *out);

/**
 * Capacity of the subset-exclusion measurement with subsets of size b.
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_repudiation_capacity(const EsckdEnsemble *handle, size_t b, double *out);

/**
 * Maximizes capacity over unitarily rotated decoders. When `out_unitary` is
 * non-null it receives the d×d unitary row-major as interleaved re/im pairs
 * (2·d² doubles).
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out_capacity` must be valid;
 * `out_unitary` must be null or point to at least 2·d² doubles.
 */
EsckdStatus esckd_optimize_rotated_decoder(const EsckdEnsemble *handle,
                                           uint64_t seed,
                                           uint32_t restarts,
                                           uint32_t iterations,
                                           double *out_capacity,
                                           double *out_unitary);

/**
 * Seeded simulation of the spherical-code protocol; the ensemble must have
 * n vectors in dimension d.
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_simulate_esc(const EsckdEnsemble *handle,
                               size_t n,
                               size_t d,
                               size_t m,
                               double q,
                               uint64_t rounds,
                               uint64_t seed,
                               EsckdSimSummary *out);

/**
 * Seeded simulation of the unbiased-basis protocol; the ensemble must hold
 * k bases of dimension d (as built by [`esckd_mub_new`]).
 *
 * # Safety
 * `handle` must be a live ensemble handle; `out` must be a valid pointer.
 */
EsckdStatus esckd_simulate_mub(const EsckdEnsemble *handle,
                               size_t d,
                               size_t k,
                               double q,
                               uint64_t rounds,
                               uint64_t seed,
                               EsckdSimSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESCKD_H */
