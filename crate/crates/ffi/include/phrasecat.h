#ifndef PHRASECAT_H
#define PHRASECAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8 or a result contained NUL.
   */
  PC_STATUS_INVALID_UTF8 = 2,
  /**
   * The catalogue document or a JSON argument did not parse.
   */
  PC_STATUS_PARSE_ERROR = 3,
  /**
   * The catalogue has validation errors.
   */
  PC_STATUS_VALIDATION_FAILED = 4,
  /**
   * The selection could not be rendered (incomplete, stale, ...).
   */
  PC_STATUS_RENDER_ERROR = 5,
  /**
   * Unknown phrase or language.
   */
  PC_STATUS_NOT_FOUND = 6,
  /**
   * Enumeration or generation bound exceeded.
   */
  PC_STATUS_LIMIT_EXCEEDED = 7,
  PC_STATUS_IO_ERROR = 8,
  /**
   * Internal error; the call had no effect.
   */
  PC_STATUS_PANIC = 99,
} PcStatus;

/**
 * Opaque catalogue handle.
 */
typedef struct PcCatalogue PcCatalogue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a catalogue document of `len` bytes. On success `*out` receives a
 * new handle. The catalogue is parsed but not validated.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes; `out` must be writable.
 */
enum PcStatus pc_catalogue_parse(const uint8_t *bytes, size_t len, struct PcCatalogue **out);

/**
 * Read and parse the catalogue file at `path`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PcStatus pc_catalogue_load(const char *path, struct PcCatalogue **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `cat` must come from this library and not be used afterwards.
 */
void pc_catalogue_free(struct PcCatalogue *cat);

/**
 * Validate the catalogue. `*report_json` receives the report
 * (`{"errors": [...], "warnings": [...]}`); `error_count` may be NULL.
 * Returns `PC_STATUS_VALIDATION_FAILED` when there are errors, the report is
 * still produced.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum PcStatus pc_catalogue_validate(const struct PcCatalogue *cat,
                                    char **report_json,
                                    size_t *error_count);

/**
 * Render a selection (JSON: `{"phrase": ..., "choices": {...}}`) in `lang`.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum PcStatus pc_render_sentence(const struct PcCatalogue *cat,
                                 const char *selection_json,
                                 const char *lang,
                                 char **out);

/**
 * Search phrases; `*hits_json` receives a JSON array of hits, best first.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum PcStatus pc_search(const struct PcCatalogue *cat,
                        const char *query,
                        size_t limit,
                        char **hits_json);

/**
 * Number of complete selections of `phrase`, as a decimal string (it may
 * exceed 64 bits).
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum PcStatus pc_enumerate_count(const struct PcCatalogue *cat, const char *phrase, char **decimal);

/**
 * `count` seeded random selections of `phrase` as a JSON array.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum PcStatus pc_generate_random(const struct PcCatalogue *cat,
                                 const char *phrase,
                                 uint64_t seed,
                                 size_t count,
                                 char **selections_json);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *pc_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHRASECAT_H */
