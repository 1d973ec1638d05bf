#ifndef FLAGFORGE_H
#define FLAGFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FfStatus {
  FF_STATUS_OK = 0,
  FF_STATUS_NULL_POINTER = 1,
  FF_STATUS_INVALID_UTF8 = 2,
  FF_STATUS_PARSE = 3,
  FF_STATUS_VALIDATION = 4,
  FF_STATUS_DOMAIN = 5,
  FF_STATUS_PANIC = 6,
} FfStatus;

/**
 * A chain complex of graded free modules.
 */
typedef struct FfComplex FfComplex;

/**
 * A graded differential module.
 */
typedef struct FfDiffModule FfDiffModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ff_last_error(void);

/**
 * Library version as a static string.
 */
const char *ff_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ff_string_free(char *s);

/**
 * Parses a complex from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum FfStatus ff_complex_from_json(const char *json, struct FfComplex **out);

/**
 * # Safety
 * `c` must be a live handle; `*out` receives a string for [`ff_string_free`].
 */
enum FfStatus ff_complex_to_json(const struct FfComplex *c, char **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, freed at most once.
 */
void ff_complex_free(struct FfComplex *c);

/**
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum FfStatus ff_complex_length(const struct FfComplex *c, size_t *out);

/**
 * `dim H^i(End(C))_j`.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum FfStatus ff_end_cohomology_dim(const struct FfComplex *c, int64_t i, int64_t j, size_t *out);

/**
 * Lower and upper bounds on the dimension of degree-`a` flags on `c`.
 *
 * # Safety
 * `c` must be a live handle; `lo` and `hi` writable.
 */
enum FfStatus ff_dim_bounds(const struct FfComplex *c, int64_t a, int64_t *lo, int64_t *hi);

/**
 * The degree-`a` fold of `c`.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum FfStatus ff_fold(const struct FfComplex *c, int64_t a, struct FfDiffModule **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum FfStatus ff_dm_from_json(const char *json, struct FfDiffModule **out);

/**
 * # Safety
 * `d` must be a live handle; `*out` receives a string for [`ff_string_free`].
 */
enum FfStatus ff_dm_to_json(const struct FfDiffModule *d, char **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, freed at most once.
 */
void ff_dm_free(struct FfDiffModule *d);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum FfStatus ff_dm_rank(const struct FfDiffModule *d, size_t *out);

/**
 * `dim H(D)_j`.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum FfStatus ff_dm_homology_dim(const struct FfDiffModule *d, int64_t j, size_t *out);

/**
 * Removes unit entries. `total_betti` may be null.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum FfStatus ff_dm_minimize(const struct FfDiffModule *d,
                             struct FfDiffModule **out,
                             size_t *total_betti);

/**
 * Non-rigid interval `[lo, hi]` of an Artinian complete intersection given
 * by its generator degrees.
 *
 * # Safety
 * `degrees` must point to `n` values; `lo` and `hi` writable.
 */
enum FfStatus ff_rigidity_window(const int64_t *degrees,
                                 size_t n,
                                 size_t nvars,
                                 int64_t *lo,
                                 int64_t *hi);

/**
 * `dim Ext^i(S/I, S/I)_j` for a complete intersection with these degrees.
 *
 * # Safety
 * `degrees` must point to `n` values and `out` writable.
 */
enum FfStatus ff_ci_ext_dim(const int64_t *degrees,
                            size_t n,
                            size_t nvars,
                            size_t i,
                            int64_t j,
                            size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLAGFORGE_H */
