#ifndef ROOMSIM_H
#define ROOMSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum RoomsimStatus {
  ROOMSIM_STATUS_OK = 0,
  ROOMSIM_STATUS_NULL_ARGUMENT = 1,
  ROOMSIM_STATUS_INVALID_UTF8 = 2,
  ROOMSIM_STATUS_PARSE_ERROR = 3,
  ROOMSIM_STATUS_NOT_FOUND = 4,
  ROOMSIM_STATUS_CONFLICT = 5,
  ROOMSIM_STATUS_VALIDATION = 6,
  ROOMSIM_STATUS_IO = 7,
  ROOMSIM_STATUS_TIMEOUT = 8,
  ROOMSIM_STATUS_SIMULATION_FAILED = 9,
  ROOMSIM_STATUS_INTERNAL = 10,
} RoomsimStatus;

// Parsed IDF document.
typedef struct RoomsimIdf RoomsimIdf;

// Simulation orchestrator with its worker pool.
typedef struct RoomsimOrchestrator RoomsimOrchestrator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *roomsim_version(void);

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *roomsim_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string returned by this library that was not yet freed.
void roomsim_string_free(char *s);

// Parses IDF text into a new document handle.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum RoomsimStatus roomsim_idf_parse(const char *text, struct RoomsimIdf **out);

// Serializes a document; free the result with `roomsim_string_free`.
//
// # Safety
// `doc` must be a live handle; `out` must be writable.
enum RoomsimStatus roomsim_idf_serialize(const struct RoomsimIdf *doc, char **out);

// Number of objects in a document.
//
// # Safety
// `doc` must be a live handle; `out` must be writable.
enum RoomsimStatus roomsim_idf_object_count(const struct RoomsimIdf *doc, size_t *out);

// Releases a document handle. NULL is ignored.
//
// # Safety
// `doc` must be NULL or a handle from `roomsim_idf_parse` that was not yet freed.
void roomsim_idf_free(struct RoomsimIdf *doc);

// Packs equal windows onto a wall. Writes the window count to
// `out_count` and up to `capacity` left-edge offsets to `offsets`, which
// may be NULL when `capacity` is 0.
//
// # Safety
// `out_count` must be writable; `offsets` must have room for `capacity` values.
enum RoomsimStatus roomsim_pack_windows(double wall_width,
                                        double window_width,
                                        double margin,
                                        double gap,
                                        size_t *out_count,
                                        double *offsets,
                                        size_t capacity);

// Runs one surrogate simulation synchronously. `params_json` uses the
// REST parameter schema. Either output pointer may be NULL.
//
// # Safety
// All input strings must be NUL-terminated; non-NULL outputs must be writable.
enum RoomsimStatus roomsim_simulate(const char *idf,
                                    const char *epw,
                                    const char *occupancy,
                                    const char *params_json,
                                    char **out_csv,
                                    char **out_eso);

// Opens a file-backed orchestrator. `energyplus_exe` may be NULL to use
// only the surrogate engine; `workers` of 0 selects the default.
//
// # Safety
// `data_root` must be NUL-terminated; `energyplus_exe` NULL or NUL-terminated; `out` writable.
enum RoomsimStatus roomsim_orchestrator_open(const char *data_root,
                                             const char *energyplus_exe,
                                             size_t workers,
                                             struct RoomsimOrchestrator **out);

// Creates a record and writes its id (free with `roomsim_string_free`).
//
// # Safety
// `handle_ptr` must be a live handle; `out_id` must be writable.
enum RoomsimStatus roomsim_orchestrator_create(const struct RoomsimOrchestrator *handle_ptr,
                                               char **out_id);

// Uploads an input of kind `idf`, `weather` or `occupancy`.
//
// # Safety
// `handle_ptr` must be live; strings NUL-terminated; `data` must hold `len` bytes.
enum RoomsimStatus roomsim_orchestrator_upload(const struct RoomsimOrchestrator *handle_ptr,
                                               const char *id,
                                               const char *kind,
                                               const uint8_t *data,
                                               size_t len);

// Validates and stores parameters given as JSON.
//
// # Safety
// `handle_ptr` must be live; strings NUL-terminated.
enum RoomsimStatus roomsim_orchestrator_configure(const struct RoomsimOrchestrator *handle_ptr,
                                                  const char *id,
                                                  const char *params_json);

// Queues a configured record for execution.
//
// # Safety
// `handle_ptr` must be live; `id` NUL-terminated.
enum RoomsimStatus roomsim_orchestrator_start(const struct RoomsimOrchestrator *handle_ptr,
                                              const char *id);

// Waits up to `timeout_ms` for a run to finish. Returns `Timeout` when it
// is still running, `SimulationFailed` when it failed.
//
// # Safety
// `handle_ptr` must be live; `id` NUL-terminated.
enum RoomsimStatus roomsim_orchestrator_wait(const struct RoomsimOrchestrator *handle_ptr,
                                             const char *id,
                                             uint64_t timeout_ms);

// Writes the status view as JSON (free with `roomsim_string_free`).
//
// # Safety
// `handle_ptr` must be live; `id` NUL-terminated; `out_json` writable.
enum RoomsimStatus roomsim_orchestrator_status(const struct RoomsimOrchestrator *handle_ptr,
                                               const char *id,
                                               char **out_json);

// Writes a result artifact of kind `csv` or `eso` (free with `roomsim_string_free`).
//
// # Safety
// `handle_ptr` must be live; strings NUL-terminated; `out` writable.
enum RoomsimStatus roomsim_orchestrator_result(const struct RoomsimOrchestrator *handle_ptr,
                                               const char *id,
                                               const char *kind,
                                               char **out);

// Releases an orchestrator, waiting for queued runs to finish. NULL is ignored.
//
// # Safety
// `handle_ptr` must be NULL or a handle from `roomsim_orchestrator_open` that was not yet freed.
void roomsim_orchestrator_free(struct RoomsimOrchestrator *handle_ptr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROOMSIM_H */
