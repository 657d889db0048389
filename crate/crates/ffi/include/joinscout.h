#ifndef JOINSCOUT_H
#define JOINSCOUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JsStatus {
  JS_STATUS_OK = 0,
  JS_STATUS_NULL_POINTER = 1,
  JS_STATUS_INVALID_ARGUMENT = 2,
  JS_STATUS_IO = 3,
  JS_STATUS_MALFORMED = 4,
  JS_STATUS_UNKNOWN_ATTRIBUTE = 5,
  JS_STATUS_LAYOUT_MISMATCH = 6,
  JS_STATUS_INVALID_UTF8 = 7,
  JS_STATUS_INTERNAL = 8,
} JsStatus;

/**
 * Trained quality predictor loaded from disk.
 */
typedef struct JsModel JsModel;

/**
 * Profile store loaded from disk.
 */
typedef struct JsStore JsStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *js_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void js_string_free(char *s);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JsStatus js_store_load(const char *path, struct JsStore **out);

/**
 * Number of profiled attributes, or 0 for NULL.
 *
 * # Safety
 * `store` must be NULL or a live handle from [`js_store_load`].
 */
size_t js_store_len(const struct JsStore *store);

/**
 * # Safety
 * `store` must be NULL or a handle from [`js_store_load`] not yet freed.
 */
void js_store_free(struct JsStore *store);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JsStatus js_model_load(const char *path, struct JsModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`js_model_load`] not yet freed.
 */
void js_model_free(struct JsModel *model);

/**
 * Top-`k` candidates for `query` (`dataset.attribute`) as a JSON list of
 * `{dataset, attribute, score}`. Free the result with [`js_string_free`].
 *
 * # Safety
 * `store` and `model` must be live handles, `query` a NUL-terminated string
 * and `out_json` a valid pointer.
 */
enum JsStatus js_discover(const struct JsStore *store,
                          const struct JsModel *model,
                          const char *query,
                          size_t k,
                          char **out_json);

/**
 * Continuous join quality with the default fitted parameters. `strictness`
 * is the offset added to the containment mean (0, 0.25 or 0.5 by name).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum JsStatus js_continuous_quality(double c, double k, double strictness, double *out);

/**
 * Discrete join quality `j / levels`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum JsStatus js_discrete_quality(double c, double k, uint32_t levels, double *out);

/**
 * Containment `|A ∩ B| / |A|` of two arrays of raw strings. Values are
 * compared as given, without preprocessing.
 *
 * # Safety
 * `a` and `b` must point to `a_len` and `b_len` NUL-terminated strings.
 */
enum JsStatus js_containment(const char *const *a,
                             size_t a_len,
                             const char *const *b,
                             size_t b_len,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JOINSCOUT_H */
