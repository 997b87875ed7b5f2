#ifndef VINFO_H
#define VINFO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define VIS_PROFILE_GENERIC 0

#define VIS_PROFILE_SOCCER 1

/**
 * Result code of every fallible call.
 */
typedef enum VisStatus {
  VIS_STATUS_OK = 0,
  VIS_STATUS_NULL_POINTER = 1,
  VIS_STATUS_INVALID_ARGUMENT = 2,
  VIS_STATUS_INVALID_CLUSTERING = 3,
  VIS_STATUS_PARSE = 4,
  VIS_STATUS_COMPUTATION = 5,
  VIS_STATUS_PANIC = 6,
} VisStatus;

/**
 * A validated clustering.
 */
typedef struct VisClustering VisClustering;

/**
 * Per-transition VI rates of a stream.
 */
typedef struct VisSeries VisSeries;

/**
 * A time-ordered stream of clusterings.
 */
typedef struct VisStream VisStream;

/**
 * Space sizes for `n` nodes. Bell numbers are split into 64-bit halves.
 */
typedef struct VisSpaceCounts {
  uint32_t n;
  uint32_t min_part;
  uint64_t partitions;
  uint64_t partitions_no_singletons;
  uint64_t bell_hi;
  uint64_t bell_lo;
  uint64_t bell_no_singletons_hi;
  uint64_t bell_no_singletons_lo;
} VisSpaceCounts;

/**
 * One transition, rates in bits per second.
 */
typedef struct VisViPoint {
  double t;
  double dt;
  double total;
  double vif;
  double vic;
  double home;
  double visitor;
} VisViPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` as a
 * NUL-terminated string, truncating to `len - 1` bytes. Returns the full
 * message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to at least `len` writable bytes.
 */
uintptr_t vis_last_error(char *buf, uintptr_t len);

/**
 * Builds a clustering from parallel arrays of node ids and cluster labels.
 *
 * # Safety
 * `nodes` and `labels` must point to `len` readable values each; `out`
 * must be writable.
 */
enum VisStatus vis_clustering_new(const uint32_t *nodes,
                                  const uint32_t *labels,
                                  uintptr_t len,
                                  uint32_t profile_code,
                                  struct VisClustering **out);

/**
 * # Safety
 * `c` must be null or a handle from [`vis_clustering_new`] not yet freed.
 */
void vis_clustering_free(struct VisClustering *c);

/**
 * Number of clusters and nodes.
 *
 * # Safety
 * `c` must be a live handle; `clusters` and `nodes` must be writable.
 */
enum VisStatus vis_clustering_shape(const struct VisClustering *c,
                                    uintptr_t *clusters,
                                    uintptr_t *nodes);

/**
 * Variation of Information between two clusterings of the same roster, in bits.
 *
 * # Safety
 * `x` and `y` must be live handles; `out` must be writable.
 */
enum VisStatus vis_vi(const struct VisClustering *x, const struct VisClustering *y, double *out);

/**
 * VI divided by the sample interval `dt`, in bits per second.
 *
 * # Safety
 * As for [`vis_vi`].
 */
enum VisStatus vis_vi_rate(const struct VisClustering *x,
                           const struct VisClustering *y,
                           double dt,
                           double *out);

/**
 * Formation part of the VI (minimum over matrices with the same margins), in bits.
 *
 * # Safety
 * As for [`vis_vi`].
 */
enum VisStatus vis_vif(const struct VisClustering *x, const struct VisClustering *y, double *out);

/**
 * Share of the VI attributed to `node`, in bits.
 *
 * # Safety
 * As for [`vis_vi`].
 */
enum VisStatus vis_node_contribution(const struct VisClustering *x,
                                     const struct VisClustering *y,
                                     uint32_t node,
                                     double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VisStatus vis_count_spaces(uint32_t n, uint32_t min_part, struct VisSpaceCounts *out);

/**
 * Parses a stream JSON document (NUL-terminated UTF-8).
 *
 * # Safety
 * `json` must be a valid C string; `out` must be writable.
 */
enum VisStatus vis_stream_from_json(const char *json,
                                    uint32_t profile_code,
                                    struct VisStream **out);

/**
 * # Safety
 * `s` must be null or a handle from [`vis_stream_from_json`] not yet freed.
 */
void vis_stream_free(struct VisStream *s);

/**
 * Number of samples; zero for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
uintptr_t vis_stream_len(const struct VisStream *s);

/**
 * Computes the VI series of a stream.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum VisStatus vis_series_new(const struct VisStream *s, struct VisSeries **out);

/**
 * # Safety
 * `s` must be null or a handle from [`vis_series_new`] not yet freed.
 */
void vis_series_free(struct VisSeries *s);

/**
 * Number of transitions; zero for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
uintptr_t vis_series_len(const struct VisSeries *s);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum VisStatus vis_series_point(const struct VisSeries *s, uintptr_t index, struct VisViPoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VINFO_H */
