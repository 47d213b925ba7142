#ifndef SRS_LAB_H
#define SRS_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SrsError {
  SRS_OK = 0,
  SRS_NULL_POINTER = 1,
  SRS_INVALID_ARGUMENT = 2,
  SRS_NOT_EXPANDING = 3,
  SRS_MARGIN_TOO_SMALL = 4,
  SRS_WITNESS_EXPLOSION = 5,
  SRS_OVERFLOW = 6,
  SRS_BUFFER_TOO_SMALL = 7,
  SRS_NO_BOUND = 8,
  SRS_INTERNAL = 9,
} SrsError;

/**
 * How an orbit ended.
 */
typedef enum SrsOrbitOutcome {
  SRS_REACHED_ZERO = 0,
  SRS_REACHED_CYCLE = 1,
  SRS_ESCAPED = 2,
  SRS_ORBIT_UNDECIDED = 3,
} SrsOrbitOutcome;

/**
 * Verdict statuses, in the order of the library's `Status`.
 */
typedef enum SrsStatus {
  SRS_IN_D_STAR = 0,
  SRS_NOT_IN_D_STAR = 1,
  SRS_CONTRACTIVE = 2,
  SRS_UNKNOWN_BOUNDED = 3,
  SRS_BOUNDARY_UNDECIDABLE = 4,
} SrsStatus;

/**
 * Opaque orbit record.
 */
typedef struct SrsOrbit SrsOrbit;

/**
 * Opaque parameter vector.
 */
typedef struct SrsParam SrsParam;

/**
 * Opaque verdict.
 */
typedef struct SrsVerdict SrsVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of an error code; unknown codes give
 * `"unknown error"`.
 */
const char *srs_error_message(int32_t code);

/**
 * Library version as a static string.
 */
const char *srs_version(void);

/**
 * Exact parameter `(n0/d0, n1/d1)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SrsError srs_param_new_rational(int64_t n0,
                                     int64_t d0,
                                     int64_t n1,
                                     int64_t d1,
                                     struct SrsParam **out);

/**
 * Parameter from two strings, each an integer, `p/q` or decimal.
 *
 * # Safety
 * `r0` and `r1` must be NUL-terminated; `out` must be valid for writes.
 */
enum SrsError srs_param_parse(const char *r0, const char *r1, struct SrsParam **out);

/**
 * # Safety
 * `p` must come from this library or be null.
 */
void srs_param_free(struct SrsParam *p);

/**
 * Closed-form classification.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum SrsError srs_classify(const struct SrsParam *p, struct SrsVerdict **out);

/**
 * Certified decision. `rho <= 0` selects the default.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum SrsError srs_decide_point(const struct SrsParam *p, double rho, struct SrsVerdict **out);

/**
 * # Safety
 * `v` must be a live handle.
 */
enum SrsError srs_verdict_status(const struct SrsVerdict *v, enum SrsStatus *out);

/**
 * Rule tag such as `Lemma4.1`, or null when the verdict has none. The
 * string is static.
 *
 * # Safety
 * `v` must be a live handle or null.
 */
const char *srs_verdict_rule(const struct SrsVerdict *v);

/**
 * Copies the cycle of a `NotInDStar` verdict into `buf`. `len` receives
 * the period (0 when there is no cycle) even when `buf` is too small.
 *
 * # Safety
 * `v` must be a live handle; `buf` must hold `cap` elements or be null with
 * `cap == 0`; `len` must be valid for writes.
 */
enum SrsError srs_verdict_cycle(const struct SrsVerdict *v, int64_t *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `v` must come from this library or be null.
 */
void srs_verdict_free(struct SrsVerdict *v);

/**
 * Iterates from `(a0, a1)` for at most `budget` steps.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum SrsError srs_orbit(const struct SrsParam *p,
                        int64_t a0,
                        int64_t a1,
                        size_t budget,
                        struct SrsOrbit **out);

/**
 * # Safety
 * `o` must be a live handle; `out` must be valid for writes.
 */
enum SrsError srs_orbit_outcome(const struct SrsOrbit *o, enum SrsOrbitOutcome *out);

/**
 * Copies the compressed orbit `a_0, a_1, ...`; same buffer protocol as
 * [`srs_verdict_cycle`].
 *
 * # Safety
 * As for [`srs_verdict_cycle`].
 */
enum SrsError srs_orbit_scalars(const struct SrsOrbit *o, int64_t *buf, size_t cap, size_t *len);

/**
 * Copies the cycle the orbit fell into, if any.
 *
 * # Safety
 * As for [`srs_verdict_cycle`].
 */
enum SrsError srs_orbit_cycle(const struct SrsOrbit *o, int64_t *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `o` must come from this library or be null.
 */
void srs_orbit_free(struct SrsOrbit *o);

/**
 * Exact check that `entries[0..len]` is a cycle of the map.
 *
 * # Safety
 * `p` must be a live handle; `entries` must hold `len` elements.
 */
enum SrsError srs_verify_cycle(const struct SrsParam *p,
                               const int64_t *entries,
                               size_t len,
                               bool *out);

/**
 * Upper bound on the absolute value of every cycle element.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum SrsError srs_cycle_bound(const struct SrsParam *p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRS_LAB_H */
