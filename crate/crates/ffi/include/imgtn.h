#ifndef IMGTN_H
#define IMGTN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  IMGTN_STATUS_OK = 0,
  IMGTN_STATUS_NULL_POINTER = 1,
  IMGTN_STATUS_INVALID_ARGUMENT = 2,
  IMGTN_STATUS_PARSE = 3,
  IMGTN_STATUS_IO = 4,
  IMGTN_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * SVD failure or a numerical rank that disagrees with the exact one.
   */
  IMGTN_STATUS_NUMERICAL = 6,
  /**
   * The caller's buffer is too short; the required length was written.
   */
  IMGTN_STATUS_BUFFER_TOO_SMALL = 7,
  IMGTN_STATUS_PANIC = 8,
} ImgtnStatus;

/**
 * An image family.
 */
typedef struct ImgtnFamily ImgtnFamily;

/**
 * A hierarchical Tucker network, generalized or diagonal.
 */
typedef struct ImgtnHtNetwork ImgtnHtNetwork;

/**
 * A tensor train.
 */
typedef struct ImgtnTensorTrain ImgtnTensorTrain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *imgtn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *imgtn_version(void);

/**
 * Generates a family. `name` is `rect`, `bars`, `stacked` or `random`;
 * `param` is the minimum side, minimum bar length or member count
 * respectively. `seed` is used by `random` only.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
ImgtnStatus imgtn_family_generate(const char *name,
                                  size_t n,
                                  size_t param,
                                  uint64_t seed,
                                  ImgtnFamily **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
ImgtnStatus imgtn_family_load(const char *path, ImgtnFamily **out);

/**
 * # Safety
 * `family` must come from this library; `path` must be NUL-terminated.
 */
ImgtnStatus imgtn_family_save(const ImgtnFamily *family, const char *path);

/**
 * # Safety
 * `family` must be null or a handle from this library not yet freed.
 */
void imgtn_family_free(ImgtnFamily *family);

/**
 * # Safety
 * `family` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_family_len(const ImgtnFamily *family, size_t *out);

/**
 * # Safety
 * `family` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_family_side(const ImgtnFamily *family, size_t *out);

/**
 * # Safety
 * `bits` must point to `len` readable bytes; `out` must be writable.
 */
ImgtnStatus imgtn_family_contains(const ImgtnFamily *family,
                                  const uint8_t *bits,
                                  size_t len,
                                  bool *out);

/**
 * Exact rank of the unfolding that splits pixels `1..=k` from the rest.
 *
 * # Safety
 * `family` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_family_prefix_rank(const ImgtnFamily *family, size_t k, size_t *out);

/**
 * # Safety
 * `family` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_tt_build(const ImgtnFamily *family, double tol, ImgtnTensorTrain **out);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
ImgtnStatus imgtn_tt_load(const char *path, ImgtnTensorTrain **out);

/**
 * # Safety
 * `tt` must come from this library; `path` must be NUL-terminated.
 */
ImgtnStatus imgtn_tt_save(const ImgtnTensorTrain *tt, const char *path);

/**
 * # Safety
 * `bits` must point to `len` readable bytes; `out` must be writable.
 */
ImgtnStatus imgtn_tt_eval(const ImgtnTensorTrain *tt, const uint8_t *bits, size_t len, double *out);

/**
 * Bond dimensions `l_0 ..= l_{n²}`. Call with `cap = 0` to learn the length.
 *
 * # Safety
 * `buf` must hold `cap` values; `len` must be writable.
 */
ImgtnStatus imgtn_tt_bonds(const ImgtnTensorTrain *tt, size_t *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `tt` must be null or a handle from this library not yet freed.
 */
void imgtn_tt_free(ImgtnTensorTrain *tt);

/**
 * Builds the generalized network; a side that is not a power of two is
 * padded with white pixels.
 *
 * # Safety
 * `family` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_ht_build(const ImgtnFamily *family, double tol, ImgtnHtNetwork **out);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
ImgtnStatus imgtn_ht_load(const char *path, ImgtnHtNetwork **out);

/**
 * # Safety
 * `net` must come from this library; `path` must be NUL-terminated.
 */
ImgtnStatus imgtn_ht_save(const ImgtnHtNetwork *net, const char *path);

/**
 * Evaluates on an image of the family's original side.
 *
 * # Safety
 * `bits` must point to `len` readable bytes; `out` must be writable.
 */
ImgtnStatus imgtn_ht_eval(const ImgtnHtNetwork *net, const uint8_t *bits, size_t len, double *out);

/**
 * Converts a generalized network to a new diagonal one; the input is kept.
 *
 * # Safety
 * `net` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_ht_diagonalize(const ImgtnHtNetwork *net, ImgtnHtNetwork **out);

/**
 * Writes `true` for diagonal form.
 *
 * # Safety
 * `net` must come from this library; `out` must be writable.
 */
ImgtnStatus imgtn_ht_is_diagonal(const ImgtnHtNetwork *net, bool *out);

/**
 * Channel count per layer, leaves first. Call with `cap = 0` to learn the length.
 *
 * # Safety
 * `buf` must hold `cap` values; `len` must be writable.
 */
ImgtnStatus imgtn_ht_channels(const ImgtnHtNetwork *net, size_t *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `net` must be null or a handle from this library not yet freed.
 */
void imgtn_ht_free(ImgtnHtNetwork *net);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMGTN_H */
