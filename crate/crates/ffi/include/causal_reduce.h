#ifndef CAUSAL_REDUCE_H
#define CAUSAL_REDUCE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_UTF8 = 2,
  CR_STATUS_PARSE = 3,
  CR_STATUS_INVALID_GRAPH = 4,
  CR_STATUS_ASSUMPTION_VIOLATION = 5,
  CR_STATUS_POSITIVITY = 6,
  CR_STATUS_INVALID_NETWORK = 7,
  CR_STATUS_PRECONDITION = 8,
  CR_STATUS_OTHER = 9,
  CR_STATUS_PANIC = 10,
} CrStatus;

typedef enum CrFormat {
  CR_FORMAT_TEXT = 0,
  CR_FORMAT_LATEX = 1,
  CR_FORMAT_JSON = 2,
} CrFormat;

/**
 * Opaque graph handle.
 */
typedef struct CrGraph CrGraph;

/**
 * Opaque discrete network handle.
 */
typedef struct CrNetwork CrNetwork;

/**
 * Opaque reduction report handle.
 */
typedef struct CrReport CrReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The caller
 * frees it with [`cr_string_free`].
 */
char *cr_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void cr_string_free(char *s);

/**
 * Parses graph-file text.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum CrStatus cr_graph_parse(const char *text, struct CrGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not yet freed.
 */
void cr_graph_free(struct CrGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t cr_graph_vertex_count(const struct CrGraph *g);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t cr_graph_edge_count(const struct CrGraph *g);

/**
 * Graph-file text of `g`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum CrStatus cr_graph_to_text(const struct CrGraph *g, char **out);

/**
 * Taxonomy sets of `g` as JSON.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum CrStatus cr_taxonomy_json(const struct CrGraph *g, char **out);

/**
 * Reduces `g`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum CrStatus cr_reduce(const struct CrGraph *g, struct CrReport **out);

/**
 * # Safety
 * `r` must be null or a handle from this library, not yet freed.
 */
void cr_report_free(struct CrReport *r);

/**
 * Number of projected-out vertices, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
uintptr_t cr_report_removed_count(const struct CrReport *r);

/**
 * A new graph handle holding the reduced graph.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum CrStatus cr_report_output(const struct CrReport *r, struct CrGraph **out);

/**
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum CrStatus cr_report_json(const struct CrReport *r, char **out);

/**
 * The g-formula of `g` in the requested rendering.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum CrStatus cr_gformula(const struct CrGraph *g, enum CrFormat format, char **out);

/**
 * Parses a network from its JSON form.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum CrStatus cr_network_parse(const char *json, struct CrNetwork **out);

/**
 * # Safety
 * `bn` must be null or a handle from this library, not yet freed.
 */
void cr_network_free(struct CrNetwork *bn);

/**
 * Exact interventional mean at treatment level `a`.
 *
 * # Safety
 * `bn` must be a live handle and `out` writable.
 */
enum CrStatus cr_g_functional(const struct CrNetwork *bn, uintptr_t a, double *out);

/**
 * Exact variance of the efficient influence function at level `a`.
 *
 * # Safety
 * `bn` must be a live handle and `out` writable.
 */
enum CrStatus cr_eif_variance(const struct CrNetwork *bn, uintptr_t a, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUSAL_REDUCE_H */
