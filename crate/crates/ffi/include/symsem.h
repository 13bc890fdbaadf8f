#ifndef SYMSEM_H
#define SYMSEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Which elements the statistics cover. Passed as a `uint32_t`.
 */
typedef enum SymsemScope {
  SYMSEM_SCOPE_PATCHES = 0,
  SYMSEM_SCOPE_OBJECTS = 1,
} SymsemScope;

/*
 Result of every fallible call.
 */
typedef enum SymsemStatus {
  SYMSEM_STATUS_OK = 0,
  SYMSEM_STATUS_NULL_ARGUMENT = 1,
  SYMSEM_STATUS_INVALID_UTF8 = 2,
  SYMSEM_STATUS_IO = 3,
  /*
   Malformed JSON or a schema mismatch.
   */
  SYMSEM_STATUS_PARSE = 4,
  /*
   Well-formed descriptor that breaks an invariant.
   */
  SYMSEM_STATUS_INVALID = 5,
  SYMSEM_STATUS_CONFIG = 6,
  SYMSEM_STATUS_ANALYSIS = 7,
  SYMSEM_STATUS_QUERY = 8,
  SYMSEM_STATUS_PANIC = 9,
  /*
   An argument outside its documented range.
   */
  SYMSEM_STATUS_INVALID_ARGUMENT = 10,
} SymsemStatus;

/*
 An analysed image.
 */
typedef struct SymsemModel SymsemModel;

/*
 Symmetry statistics. The `has_*` flags are 0 when the mean is
 undefined, in which case the value is 0.
 */
typedef struct SymsemStats {
  uint64_t num_elements;
  uint64_t num_symmetric;
  double relative_symmetry;
  double mean_divergence;
  double mean_similarity;
  uint8_t has_mean_divergence;
  uint8_t has_mean_similarity;
} SymsemStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *symsem_version(void);

/*
 Message of the last failed call on this thread, or null after a
 success. Valid until the next call on the same thread.
 */
const char *symsem_last_error(void);

/*
 Checks a descriptor document. Writes the number of invariant
 violations to `violations`; the status is `Invalid` when it is non-zero.

 # Safety
 `descriptor_json` is a NUL-terminated string; `violations` points to
 writable memory.
 */
enum SymsemStatus symsem_validate_json(const char *descriptor_json, uint64_t *violations);

/*
 Analyses a descriptor document into a model. `config_toml` may be null
 for the default configuration. The bundled taxonomy is used.

 # Safety
 String arguments are null or NUL-terminated; `out` points to writable
 memory. On success `*out` owns a model for `symsem_model_free`.
 */
enum SymsemStatus symsem_analyze_json(const char *descriptor_json,
                                      const char *config_toml,
                                      struct SymsemModel **out);

/*
 Reads a model previously written as JSON.

 # Safety
 `model_json` is NUL-terminated; `out` points to writable memory.
 */
enum SymsemStatus symsem_model_from_json(const char *model_json, struct SymsemModel **out);

/*
 Serialises a model. The string is freed with `symsem_string_free`.

 # Safety
 `model` is a live handle; `out` points to writable memory.
 */
enum SymsemStatus symsem_model_to_json(const struct SymsemModel *model, char **out);

/*
 Runs a query and renders the answers, one solution per line followed
 by a `% N solutions` footer.

 # Safety
 `model` is a live handle, `query` NUL-terminated, `out` writable.
 */
enum SymsemStatus symsem_query(const struct SymsemModel *model, const char *query, char **out);

/*
 Symmetry statistics of one scope, a [`SymsemScope`] value.

 # Safety
 `model` is a live handle; `out` points to writable memory.
 */
enum SymsemStatus symsem_stats(const struct SymsemModel *model,
                               uint32_t scope,
                               struct SymsemStats *out);

/*
 Releases a model. Null is ignored.

 # Safety
 `model` is null or a handle not yet freed.
 */
void symsem_model_free(struct SymsemModel *model);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` is null or a string from this library not yet freed.
 */
void symsem_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMSEM_H */
