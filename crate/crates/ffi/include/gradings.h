#ifndef GRADINGS_FFI_H
#define GRADINGS_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define GR_OK 0

/**
 * Malformed input: unknown tag or name, unparsable JSON or field spelling.
 */
#define GR_USAGE 1

/**
 * Well-formed input that fails a mathematical check.
 */
#define GR_VERIFICATION 2

/**
 * A required pointer argument was null or not valid UTF-8.
 */
#define GR_NULL 3

/**
 * An internal invariant failed; the library state is still usable.
 */
#define GR_PANIC 4

/**
 * Opaque handle to a group grading of a finite-dimensional algebra.
 */
typedef struct GrGrading GrGrading;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Never null; empty
 * before the first failure. Valid until the next failing call.
 */
const char *gr_last_error(void);

/**
 * Library version as a static string; do not free.
 */
const char *gr_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not freed before.
 */
void gr_string_free(char *s);

/**
 * Parses a grading from its JSON document (a bare grading document or a
 * catalog entry wrapping one) and stores a handle in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 buffer and `out` a valid pointer.
 */
int32_t gr_grading_from_json(const char *json, struct GrGrading **out);

/**
 * Checks the grading axiom on every composable pair of basis morphisms.
 * Returns `GR_OK` when the axiom holds; `GR_VERIFICATION` with the violating
 * product in `gr_last_error` otherwise.
 *
 * # Safety
 * `g` must be a live handle from `gr_grading_from_json`.
 */
int32_t gr_grading_verify(const struct GrGrading *g);

/**
 * Number of distinct degrees carried by basis morphisms, or -1 on error.
 *
 * # Safety
 * `g` must be a live handle from `gr_grading_from_json`.
 */
int64_t gr_grading_support(const struct GrGrading *g);

/**
 * Total number of basis morphisms, or -1 on error.
 *
 * # Safety
 * `g` must be a live handle from `gr_grading_from_json`.
 */
int64_t gr_grading_dimension(const struct GrGrading *g);

/**
 * Serializes the grading back to its JSON document.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
int32_t gr_grading_to_json(const struct GrGrading *g, char **out);

/**
 * Releases a grading handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not freed before.
 */
void gr_grading_free(struct GrGrading *g);

/**
 * JSON array of the built-in grading names and summaries.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t gr_catalog_list(char **out);

/**
 * Builds a named catalog grading over `field` (null or empty for the
 * default) and returns its JSON document.
 *
 * # Safety
 * `name` must be NUL-terminated UTF-8; `field` null or the same; `out` valid.
 */
int32_t gr_catalog_build(const char *name, const char *field, char **out);

/**
 * Computes the fundamental group of a tagged algebra and returns the JSON
 * report. `field` may be null for the default rule; `radius` 0 means the
 * default certification radius 6.
 *
 * # Safety
 * `tag` must be NUL-terminated UTF-8; `field` null or the same; `out` valid.
 */
int32_t gr_pi1(const char *tag, const char *field, uint32_t radius, char **out);

/**
 * The six-row classification table for the four-point diagonal algebra,
 * as JSON.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t gr_k4_table(char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GRADINGS_FFI_H */
