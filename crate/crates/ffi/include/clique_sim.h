#ifndef CLIQUE_SIM_H
#define CLIQUE_SIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_INVALID_GRAPH = 3,
  /**
   * A routing, sorting or aggregation precondition was violated.
   */
  CS_STATUS_LOAD_VIOLATION = 4,
  /**
   * A runtime bound or correctness assertion failed.
   */
  CS_STATUS_ASSERTION_FAILED = 5,
  CS_STATUS_BUFFER_TOO_SMALL = 6,
  CS_STATUS_PANIC = 7,
} CsStatus;

typedef enum {
  CS_STRATEGY_SAFE_BORUVKA = 0,
  CS_STRATEGY_SQUARING = 1,
} CsStrategy;

/**
 * Opaque graph handle.
 */
typedef struct CsGraph CsGraph;

/**
 * Opaque result handle: a forest plus the run's metrics.
 */
typedef struct CsResult CsResult;

typedef struct {
  uint64_t seed;
  uint64_t route_cost;
  uint64_t sort_cost;
  uint64_t agg_cost;
  double c_sample;
  CsStrategy strategy;
} CsConfig;

typedef struct {
  uint32_t u;
  uint32_t v;
  uint64_t w;
} CsEdge;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with the library defaults and the given seed.
 *
 * # Safety
 * `out` must point to writable memory for one `CsConfig`.
 */
CsStatus cs_config_default(uint64_t seed, CsConfig *out);

/**
 * Builds a graph on `n` vertices from `m` edges.
 *
 * # Safety
 * `edges` must point to `m` readable `CsEdge` values (it may be null when
 * `m` is zero) and `out` must be writable.
 */
CsStatus cs_graph_new(size_t n, const CsEdge *edges, size_t m, CsGraph **out);

/**
 * Parses the plain-text `n m` / `u v [w]` format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
CsStatus cs_graph_parse(const char *text, CsGraph **out);

/**
 * # Safety
 * `graph` must come from `cs_graph_new` or `cs_graph_parse` and not have
 * been freed. Null is ignored.
 */
void cs_graph_free(CsGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t cs_graph_vertex_count(const CsGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t cs_graph_edge_count(const CsGraph *graph);

/**
 * Maximal spanning forest by the three-phase connectivity algorithm.
 *
 * # Safety
 * `graph` and `config` must be live, `out` writable.
 */
CsStatus cs_conn(const CsGraph *graph, const CsConfig *config, CsResult **out);

/**
 * Exact minimum spanning forest.
 *
 * # Safety
 * `graph` and `config` must be live, `out` writable.
 */
CsStatus cs_exact_mst(const CsGraph *graph, const CsConfig *config, CsResult **out);

/**
 * # Safety
 * `result` must be a live handle or null.
 */
size_t cs_result_edge_count(const CsResult *result);

/**
 * Copies the forest edges, sorted by `(w, u, v)`, into `buf`.
 *
 * # Safety
 * `result` must be live and `buf` must have room for `cap` edges.
 */
CsStatus cs_result_edges(const CsResult *result, CsEdge *buf, size_t cap);

/**
 * Round metrics as a JSON string. Release with `cs_string_free`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
char *cs_result_metrics_json(const CsResult *result);

/**
 * # Safety
 * `result` must come from `cs_conn` or `cs_exact_mst`, or be null.
 */
void cs_result_free(CsResult *result);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void cs_string_free(char *s);

/**
 * Message for the last failed call on this thread, empty after a
 * success. Release with `cs_string_free`.
 */
char *cs_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLIQUE_SIM_H */
