#ifndef FUZZY_TCP_H
#define FUZZY_TCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtcpStatus {
  FTCP_STATUS_OK = 0,
  FTCP_STATUS_NULL_POINTER = 1,
  FTCP_STATUS_INVALID_ARGUMENT = 2,
  FTCP_STATUS_IO = 3,
  FTCP_STATUS_PARSE = 4,
  FTCP_STATUS_VALIDATION = 5,
  FTCP_STATUS_EMPTY_AGGREGATE = 6,
  FTCP_STATUS_CYCLE = 7,
  /**
   * The output buffer is too small; the required length was written to
   * the `written` out-parameter.
   */
  FTCP_STATUS_BUFFER_TOO_SMALL = 8,
  FTCP_STATUS_PANIC = 9,
} FtcpStatus;

typedef enum FtcpMode {
  FTCP_MODE_RUN_ONCE = 0,
  FTCP_MODE_FRESH_CHAIN = 1,
} FtcpMode;

/**
 * Opaque validated test-case dataset.
 */
typedef struct FtcpDataset FtcpDataset;

/**
 * Opaque inference engine.
 */
typedef struct FtcpEngine FtcpEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null when the
 * last call succeeded. Valid until the next `ftcp_*` call on this thread.
 */
const char *ftcp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ftcp_version(void);

/**
 * Engine with the bundled partitions and rule base.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FtcpStatus ftcp_engine_new_default(struct FtcpEngine **out);

/**
 * Engine from a variables file and a rules file. `resolution` is the
 * number of centroid samples; pass 0 for the default.
 *
 * # Safety
 * `variables` and `rules` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum FtcpStatus ftcp_engine_from_files(const char *variables,
                                       const char *rules,
                                       size_t resolution,
                                       struct FtcpEngine **out);

/**
 * # Safety
 * `engine` must be null or a handle from this library not yet freed.
 */
void ftcp_engine_free(struct FtcpEngine *engine);

/**
 * Crisp priority for one (execution time, failure rate) pair.
 *
 * # Safety
 * `engine` must be a live handle; `priority` must be writable.
 */
enum FtcpStatus ftcp_engine_infer(const struct FtcpEngine *engine,
                                  double exec_time,
                                  double failure_rate,
                                  double *priority);

/**
 * Human-readable inference trace. Release the string with
 * [`ftcp_string_free`].
 *
 * # Safety
 * `engine` must be a live handle; `out` must be writable.
 */
enum FtcpStatus ftcp_engine_explain(const struct FtcpEngine *engine,
                                    double exec_time,
                                    double failure_rate,
                                    char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void ftcp_string_free(char *s);

/**
 * The bundled 20-case sample dataset.
 *
 * # Safety
 * `out` must be writable.
 */
enum FtcpStatus ftcp_dataset_new_default(struct FtcpDataset **out);

/**
 * Loads a `.csv` or `.json` dataset.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum FtcpStatus ftcp_dataset_load(const char *path, struct FtcpDataset **out);

/**
 * # Safety
 * `dataset` must be null or a handle from this library not yet freed.
 */
void ftcp_dataset_free(struct FtcpDataset *dataset);

/**
 * Number of test cases, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t ftcp_dataset_len(const struct FtcpDataset *dataset);

/**
 * Ranks the dataset. Writes test ids in rank order to `ids` and, when
 * `scores` is non-null, the matching final scores. Both buffers hold
 * `capacity` entries; `written` receives the number of tests.
 *
 * # Safety
 * Handles must be live; `ids` and (if non-null) `scores` must have room for
 * `capacity` entries; `written` must be writable.
 */
enum FtcpStatus ftcp_prioritize(const struct FtcpEngine *engine,
                                const struct FtcpDataset *dataset,
                                uint32_t *ids,
                                double *scores,
                                size_t capacity,
                                size_t *written);

/**
 * Ranks the dataset and writes the test ids of the resulting execution
 * plan, including inserted prerequisite runs, to `steps`.
 *
 * # Safety
 * Handles must be live; `steps` must have room for `capacity` entries;
 * `written` must be writable.
 */
enum FtcpStatus ftcp_schedule(const struct FtcpEngine *engine,
                              const struct FtcpDataset *dataset,
                              enum FtcpMode mode,
                              uint32_t *steps,
                              size_t capacity,
                              size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZY_TCP_H */
