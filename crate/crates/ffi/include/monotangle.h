#ifndef MONOTANGLE_H
#define MONOTANGLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes of every fallible call.
typedef enum MtStatus {
  MT_STATUS_OK = 0,
  MT_STATUS_NULL_POINTER = 1,
  MT_STATUS_INVALID_STATE = 2,
  MT_STATUS_INVALID_INPUT = 3,
  MT_STATUS_UNSUPPORTED = 4,
  MT_STATUS_JSON = 5,
  MT_STATUS_IO = 6,
  MT_STATUS_UTF8 = 7,
  MT_STATUS_PANIC = 8,
} MtStatus;

// Roof search settings plus verdict tolerances for strong-monogamy checks.
typedef struct MtRoofConfig MtRoofConfig;

// Normalized pure state.
typedef struct MtState MtState;

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *mt_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *mt_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string obtained from this library, freed once.
void mt_string_free(char *s);

// State from `len = 2^num_qubits` amplitudes given as separate real and
// imaginary arrays. Unnormalized input is renormalized.
//
// # Safety
// `re` and `im` must point to `len` readable doubles; `out` must be
// writable.
enum MtStatus mt_state_from_amplitudes(size_t num_qubits,
                                       const double *re,
                                       const double *im,
                                       size_t len,
                                       struct MtState **out);

// State from `{"num_qubits": n, "amplitudes": [[re, im], ...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MtStatus mt_state_from_json(const char *json, struct MtState **out);

// Generalized W-class state `a|0...0> + sum_k b_k |0..1_k..0>` on
// `n = b_len` qubits; the coefficients must be normalized.
//
// # Safety
// `b_re` and `b_im` must point to `b_len` readable doubles; `out` must be
// writable.
enum MtStatus mt_state_wclass(double a_re,
                              double a_im,
                              const double *b_re,
                              const double *b_im,
                              size_t b_len,
                              struct MtState **out);

// Seeded random W-class state on `n` qubits.
//
// # Safety
// `out` must be writable.
enum MtStatus mt_state_wclass_random(size_t n, uint64_t seed, struct MtState **out);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum MtStatus mt_state_num_qubits(const struct MtState *state, size_t *out);

// JSON text of the state; free with [`mt_string_free`].
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum MtStatus mt_state_to_json(const struct MtState *state, char **out);

// Releases a state. Null is ignored.
//
// # Safety
// `state` must be null or a handle from this library, freed once.
void mt_state_free(struct MtState *state);

// Default roof settings (seed 0, 32 restarts, padding 2) and tolerances.
//
// # Safety
// `out` must be writable.
enum MtStatus mt_roof_config_new(struct MtRoofConfig **out);

// Roof settings from `{"seed", "restarts", "padding", "max_sweeps", "tol"}`;
// omitted fields keep their defaults.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MtStatus mt_roof_config_from_json(const char *json, struct MtRoofConfig **out);

// # Safety
// `config` must be a live handle.
enum MtStatus mt_roof_config_set_seed(struct MtRoofConfig *config, uint64_t seed);

// # Safety
// `config` must be a live handle.
enum MtStatus mt_roof_config_set_restarts(struct MtRoofConfig *config, size_t restarts);

// Verdict tolerances for closed-form-only and roof-containing residuals.
//
// # Safety
// `config` must be a live handle.
enum MtStatus mt_roof_config_set_tolerances(struct MtRoofConfig *config,
                                            double closed,
                                            double roof);

// Releases a configuration. Null is ignored.
//
// # Safety
// `config` must be null or a handle from this library, freed once.
void mt_roof_config_free(struct MtRoofConfig *config);

// `tau(focus | rest)` of a pure state; labels are 1-based.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum MtStatus mt_one_tangle(const struct MtState *state, size_t focus, double *out);

// Squared concurrence of the two-qubit reduction on labels `a` and `b`.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum MtStatus mt_two_tangle(const struct MtState *state, size_t a, size_t b, double *out);

// One-tangle of `focus` minus all its two-tangles.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum MtStatus mt_ckw_residual(const struct MtState *state, size_t focus, double *out);

// n-tangle of the whole state with hub `focus`. `config` may be null for
// defaults; `converged` may be null.
//
// # Safety
// `state` must be a live handle, `config` null or live; `out` must be
// writable.
enum MtStatus mt_n_tangle(const struct MtState *state,
                          size_t focus,
                          const struct MtRoofConfig *config,
                          double *out,
                          bool *converged);

// Strong-monogamy report for hub `focus` as JSON (free with
// [`mt_string_free`]). `residual` and `violation` may be null; the latter
// is set when the residual lies below minus the applicable tolerance.
//
// # Safety
// `state` must be a live handle, `config` null or live; `out_json` must be
// writable.
enum MtStatus mt_sm_check(const struct MtState *state,
                          size_t focus,
                          const struct MtRoofConfig *config,
                          char **out_json,
                          double *residual,
                          bool *violation);

#endif  /* MONOTANGLE_H */
