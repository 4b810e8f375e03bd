#ifndef TWISTED_EP_H
#define TWISTED_EP_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TepStatus {
  TEP_STATUS_OK = 0,
  TEP_STATUS_NULL_POINTER = 1,
  TEP_STATUS_INVALID_UTF8 = 2,
  TEP_STATUS_SCHEMA = 3,
  TEP_STATUS_DOMAIN = 4,
  TEP_STATUS_UNSUPPORTED = 5,
  TEP_STATUS_DIVERGENCE = 6,
  TEP_STATUS_NOT_IN_KERNEL = 7,
  TEP_STATUS_CONSTRUCTION = 8,
  TEP_STATUS_ENCODING = 9,
  TEP_STATUS_PANIC = 10,
} TepStatus;

typedef struct TepKatsura TepKatsura;

typedef struct TepTuple TepTuple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next failing call.
 */
const char *tep_last_error(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void tep_string_free(char *s);

/**
 * Parses a tuple (or bare graph) from JSON. `field` may be null.
 *
 * # Safety
 * Pointers must be valid; `out` receives a handle to free with [`tep_tuple_free`].
 */
enum TepStatus tep_tuple_from_json(const char *json, const char *field, struct TepTuple **out);

/**
 * # Safety
 * `t` must come from this library and not be freed twice.
 */
void tep_tuple_free(struct TepTuple *t);

/**
 * # Safety
 * Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
 */
enum TepStatus tep_tuple_to_json(const struct TepTuple *t, char **out);

/**
 * Checks the tuple laws; `valid` receives the verdict.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TepStatus tep_tuple_validate(const struct TepTuple *t,
                                  uint64_t seed,
                                  uintptr_t samples,
                                  bool *valid);

/**
 * Product of two elements given as JSON term arrays.
 *
 * # Safety
 * Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
 */
enum TepStatus tep_mul(const struct TepTuple *t, const char *x, const char *y, char **out);

/**
 * Normal form in the quotient algebra with the default section. A
 * `step_cap` of 0 keeps the default.
 *
 * # Safety
 * Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
 */
enum TepStatus tep_nf(const struct TepTuple *t, const char *x, uintptr_t step_cap, char **out);

/**
 * Parses a Katsura triple `{"A", "B", "C"?, ...}`. `field` may be null.
 *
 * # Safety
 * Pointers must be valid; `out` receives a handle to free with [`tep_katsura_free`].
 */
enum TepStatus tep_katsura_from_json(const char *json, const char *field, struct TepKatsura **out);

/**
 * # Safety
 * `k` must come from this library and not be freed twice.
 */
void tep_katsura_free(struct TepKatsura *k);

/**
 * # Safety
 * Pointers must be valid; `out` receives a handle to free with [`tep_tuple_free`].
 */
enum TepStatus tep_katsura_build_tuple(const struct TepKatsura *k, struct TepTuple **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum TepStatus tep_katsura_is_kspi(const struct TepKatsura *k, bool *kspi);

/**
 * `{"KH0": ..., "KH1": ...}` as JSON.
 *
 * # Safety
 * Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
 */
enum TepStatus tep_katsura_ktheory(const struct TepKatsura *k, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTED_EP_H */
