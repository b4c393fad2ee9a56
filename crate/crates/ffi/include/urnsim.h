#ifndef URNSIM_H
#define URNSIM_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum UrnsimStatus {
  URNSIM_OK = 0,
  /**
   * The JSON config was malformed or violated a model constraint.
   */
  URNSIM_INVALID_CONFIG = 1,
  /**
   * An argument was out of range for the requested operation.
   */
  URNSIM_INVALID_ARGUMENT = 2,
  /**
   * A required pointer was NULL.
   */
  URNSIM_NULL_POINTER = 3,
  /**
   * The implementation panicked; this is a bug.
   */
  URNSIM_INTERNAL_ERROR = 4,
} UrnsimStatus;

/**
 * Opaque scheme handle.
 */
typedef struct UrnsimScheme UrnsimScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer is
 * valid until the next failing call on the same thread; do not free it.
 */
const char *urnsim_last_error(void);

/**
 * Builds a scheme from a JSON config document.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string; `out` must be a valid
 * pointer to receive the handle.
 */
enum UrnsimStatus urnsim_scheme_from_json(const char *json, struct UrnsimScheme **out);

/**
 * Releases a scheme handle. NULL is ignored.
 *
 * # Safety
 * `scheme` must have come from [`urnsim_scheme_from_json`] and must not be
 * used afterwards.
 */
void urnsim_scheme_free(struct UrnsimScheme *scheme);

/**
 * Writes the regime report as a JSON string.
 *
 * # Safety
 * `scheme` must be a live handle; `out_json` must be valid.
 */
enum UrnsimStatus urnsim_analyze_json(const struct UrnsimScheme *scheme, char **out_json);

/**
 * Simulates one trajectory and writes its CSV (header `n,p,color`).
 *
 * # Safety
 * `scheme` must be a live handle; `out_csv` must be valid.
 */
enum UrnsimStatus urnsim_simulate_csv(const struct UrnsimScheme *scheme,
                                      uint64_t max_steps,
                                      uint64_t seed,
                                      char **out_csv);

/**
 * Survival probability `P{tau > horizon}` for one initial composition.
 *
 * # Safety
 * `scheme` must be a live handle; `out_q0` must be valid.
 */
enum UrnsimStatus urnsim_survival_q0(const struct UrnsimScheme *scheme,
                                     uint64_t horizon,
                                     int64_t t0,
                                     int64_t alpha0,
                                     double *out_q0);

/**
 * Runs a trajectory batch and writes the statistics as a JSON string.
 *
 * # Safety
 * `scheme` must be a live handle; `out_json` must be valid.
 */
enum UrnsimStatus urnsim_batch_json(const struct UrnsimScheme *scheme,
                                    uint64_t n_trajectories,
                                    uint64_t max_steps,
                                    uint64_t seed,
                                    char **out_json);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must have been returned by this library and must not be used
 * afterwards.
 */
void urnsim_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URNSIM_H */
