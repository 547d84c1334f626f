#ifndef CECH_H
#define CECH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CECH_CONVENTION_ABG 0

#define CECH_CONVENTION_GBA 1

typedef enum CechStatus {
  CECH_STATUS_OK = 0,
  CECH_STATUS_INPUT_ERROR = 1,
  /**
   * The computation succeeded and its answer is an obstruction.
   */
  CECH_STATUS_OBSTRUCTED = 2,
  CECH_STATUS_UNSUPPORTED = 3,
  CECH_STATUS_NULL_POINTER = 4,
  CECH_STATUS_INTERNAL = 5,
  CECH_STATUS_PANIC = 6,
} CechStatus;

/**
 * A 1-cochain on a nerve.
 */
typedef struct CechCochain CechCochain;

typedef struct CechCover CechCover;

typedef struct CechNerve CechNerve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *cech_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, freed at most once.
 */
void cech_string_free(char *s);

/**
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum CechStatus cech_cover_from_json(const char *json, struct CechCover **out);

/**
 * # Safety
 * `cover` is null or a live handle, freed at most once.
 */
void cech_cover_free(struct CechCover *cover);

/**
 * Order of the cover; `-1` when no point is covered.
 *
 * # Safety
 * `cover` is a live handle; `out_order` is writable.
 */
enum CechStatus cech_cover_order(const struct CechCover *cover, int64_t *out_order);

/**
 * # Safety
 * `cover` is a live handle; `out` is writable.
 */
enum CechStatus cech_nerve_build(const struct CechCover *cover,
                                 uint32_t max_dim,
                                 struct CechNerve **out);

/**
 * # Safety
 * `nerve` is null or a live handle, freed at most once.
 */
void cech_nerve_free(struct CechNerve *nerve);

/**
 * Simplex counts; any output pointer may be null.
 *
 * # Safety
 * `nerve` is a live handle; non-null outputs are writable.
 */
enum CechStatus cech_nerve_counts(const struct CechNerve *nerve,
                                  size_t *vertices,
                                  size_t *edges,
                                  size_t *triangles);

/**
 * # Safety
 * `nerve` is a live handle; `out_json` is writable.
 */
enum CechStatus cech_nerve_to_json(const struct CechNerve *nerve, char **out_json);

/**
 * Parses a degree-1 cochain file against `nerve`.
 *
 * # Safety
 * `nerve` is a live handle; `json` is a nul-terminated string; `out` is writable.
 */
enum CechStatus cech_cochain_from_json(const struct CechNerve *nerve,
                                       const char *json,
                                       struct CechCochain **out);

/**
 * # Safety
 * `cochain` is null or a live handle, freed at most once.
 */
void cech_cochain_free(struct CechCochain *cochain);

/**
 * Solves `δ₀t = r`. Returns `OBSTRUCTED` with a holonomy witness in
 * `out_json` when no solution exists.
 *
 * # Safety
 * `cochain` is a live handle; `out_json` is writable.
 */
enum CechStatus cech_solve_coboundary(const struct CechCochain *cochain,
                                      uint32_t convention_code,
                                      char **out_json);

/**
 * First cohomology; `coefficients` is `z`, `r` or `zmod:n`.
 *
 * # Safety
 * `nerve` is a live handle; `coefficients` is a nul-terminated string;
 * `out_json` is writable.
 */
enum CechStatus cech_h1(const struct CechNerve *nerve, const char *coefficients, char **out_json);

/**
 * Lifts along `via` (`r-to-t`, `z-to-zmod:n`, `zmod-to-zmod:n:m`,
 * `gl-det:n`). Returns `OBSTRUCTED` when no strict lift exists.
 *
 * # Safety
 * `cochain` is a live handle; `via` is a nul-terminated string;
 * `out_json` is writable.
 */
enum CechStatus cech_lift(const struct CechCochain *cochain, const char *via, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CECH_H */
