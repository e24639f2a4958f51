#ifndef TYPEALIGN_H
#define TYPEALIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TA_MEASURE_JACCARD 0

#define TA_MEASURE_G_JACCARD 1

#define TA_MEASURE_LOG_TF 2

// Bit `1 << TA_MEASURE_*` selects a measure in [`ta_align`].
#define TA_MEASURES_ALL 7

typedef enum TaStatus {
  TA_STATUS_OK = 0,
  TA_STATUS_NULL_ARGUMENT = 1,
  TA_STATUS_INVALID_UTF8 = 2,
  TA_STATUS_INVALID_ARGUMENT = 3,
  TA_STATUS_IO = 4,
  TA_STATUS_FORMAT = 5,
  TA_STATUS_NOT_FOUND = 6,
  TA_STATUS_INTERNAL = 7,
} TaStatus;

typedef struct TaAlignmentTable TaAlignmentTable;

typedef struct TaProfileSet TaProfileSet;

// Top-k targets of one source with their scores.
typedef struct TaRanking TaRanking;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *ta_version(void);

// Message of the last failing call on this thread; empty if none.
const char *ta_last_error(void);

// Loads a consolidated profile file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum TaStatus ta_profiles_load(const char *path, struct TaProfileSet **out);

// Number of types in the set; 0 for null.
//
// # Safety
// `set` must be null or a live handle.
size_t ta_profiles_len(const struct TaProfileSet *set);

// # Safety
// `set` must be null or a handle not yet freed.
void ta_profiles_free(struct TaProfileSet *set);

// Similarity of one type of `a` and one type of `b` under `measure`.
//
// # Safety
// Handles must be live, strings NUL-terminated and `out` writable.
enum TaStatus ta_profiles_score(const struct TaProfileSet *a,
                                const char *type_a,
                                const struct TaProfileSet *b,
                                const char *type_b,
                                uint32_t measure,
                                double *out);

// Scores every cross pair of `a` and `b` under the measures selected by
// `measure_mask` (bit `1 << TA_MEASURE_*`).
//
// # Safety
// Handles must be live and `out` writable.
enum TaStatus ta_align(const struct TaProfileSet *a,
                       const struct TaProfileSet *b,
                       uint32_t measure_mask,
                       struct TaAlignmentTable **out);

// Reads an alignment table TSV.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum TaStatus ta_table_load(const char *path, struct TaAlignmentTable **out);

// Writes the table as TSV.
//
// # Safety
// `table` must be live and `path` NUL-terminated.
enum TaStatus ta_table_save(const struct TaAlignmentTable *table, const char *path);

// Number of scored pairs; 0 for null.
//
// # Safety
// `table` must be null or a live handle.
size_t ta_table_len(const struct TaAlignmentTable *table);

// # Safety
// `table` must be null or a handle not yet freed.
void ta_table_free(struct TaAlignmentTable *table);

// Stored score of one pair.
//
// # Safety
// `table` must be live, strings NUL-terminated and `out` writable.
enum TaStatus ta_table_score(const struct TaAlignmentTable *table,
                             const char *type_a,
                             const char *type_b,
                             uint32_t measure,
                             double *out);

// Number of pairs scoring at least `theta`.
//
// # Safety
// `table` must be live and `out` writable.
enum TaStatus ta_table_threshold_count(const struct TaAlignmentTable *table,
                                       uint32_t measure,
                                       double theta,
                                       size_t *out);

// The `k` best targets of `source`, highest score first.
//
// # Safety
// `table` must be live, `source` NUL-terminated and `out` writable.
enum TaStatus ta_table_top_k(const struct TaAlignmentTable *table,
                             const char *source,
                             uint32_t measure,
                             size_t k,
                             struct TaRanking **out);

// # Safety
// `ranking` must be null or a live handle.
size_t ta_ranking_len(const struct TaRanking *ranking);

// Target at rank `i`, or null when out of range.
//
// # Safety
// `ranking` must be null or a live handle.
const char *ta_ranking_target(const struct TaRanking *ranking, size_t i);

// Score at rank `i`, or NaN when out of range.
//
// # Safety
// `ranking` must be null or a live handle.
double ta_ranking_score(const struct TaRanking *ranking, size_t i);

// # Safety
// `ranking` must be null or a handle not yet freed.
void ta_ranking_free(struct TaRanking *ranking);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TYPEALIGN_H */
