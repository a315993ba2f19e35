#ifndef SUSYHOM_H
#define SUSYHOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
typedef enum SusyhomStatus {
  /**
   * Success.
   */
  SUSYHOM_STATUS_OK = 0,
  /**
   * Invalid arguments or input data.
   */
  SUSYHOM_STATUS_INVALID_INPUT = 1,
  /**
   * A precondition or promise failed (empty sector, density floor, ...).
   */
  SUSYHOM_STATUS_PRECONDITION = 2,
  /**
   * Internal panic; the handle state is unspecified.
   */
  SUSYHOM_STATUS_PANIC = 3,
} SusyhomStatus;

/**
 * Betti computation backends.
 */
typedef enum SusyhomMethod {
  SUSYHOM_METHOD_EXACT_RANK = 0,
  SUSYHOM_METHOD_SPECTRAL = 1,
} SusyhomMethod;

/**
 * Opaque verified-complex handle.
 */
typedef struct SusyhomComplex SusyhomComplex;

/**
 * Opaque graph handle.
 */
typedef struct SusyhomGraph SusyhomGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message (UTF-8, NUL-terminated, truncated to fit)
 * into `buf`. Returns the full message length in bytes.
 */
size_t susyhom_last_error_message(char *buf, size_t len);

/**
 * Parse an edge-list description (first data line: vertex count; then one
 * `u v` pair per line; `#` starts a comment).
 */
enum SusyhomStatus susyhom_graph_parse(const char *text, struct SusyhomGraph **out);

/**
 * Build a graph from an edge array laid out as `u0, v0, u1, v1, ...`.
 */
enum SusyhomStatus susyhom_graph_new(uint32_t n,
                                     const uint32_t *edges,
                                     size_t num_edges,
                                     struct SusyhomGraph **out);

void susyhom_graph_free(struct SusyhomGraph *g);

/**
 * Verified cochain complex of the independence complex of the graph.
 */
enum SusyhomStatus susyhom_complex_independence(const struct SusyhomGraph *g,
                                                struct SusyhomComplex **out);

/**
 * Verified cochain complex of the clique complex of the graph.
 */
enum SusyhomStatus susyhom_complex_clique(const struct SusyhomGraph *g,
                                          struct SusyhomComplex **out);

void susyhom_complex_free(struct SusyhomComplex *c);

/**
 * Dimension of the fermion-number-`level` sector.
 */
enum SusyhomStatus susyhom_sector_dim(const struct SusyhomComplex *c, size_t level, size_t *out);

/**
 * Betti number of one sector.
 */
enum SusyhomStatus susyhom_betti(const struct SusyhomComplex *c,
                                 size_t level,
                                 enum SusyhomMethod method,
                                 size_t *out);

/**
 * Witten index, cross-checked against both the dimension and Betti
 * alternating sums.
 */
enum SusyhomStatus susyhom_witten_index(const struct SusyhomComplex *c, int64_t *out);

/**
 * Sector Laplacian spectrum, ascending. Writes at most `cap` values into
 * `buf` and stores the full length in `len`.
 */
enum SusyhomStatus susyhom_sector_spectrum(const struct SusyhomComplex *c,
                                           size_t level,
                                           double *buf,
                                           size_t cap,
                                           size_t *len);

/**
 * Full spectral report (dimensions, Betti numbers, Euler characteristic,
 * Witten index, gaps, pairing) as a JSON string. Free the result with
 * `susyhom_string_free`.
 */
enum SusyhomStatus susyhom_spectral_report_json(const struct SusyhomComplex *c, char **out);

/**
 * Quasi-Betti-number estimate on one sector; the report is returned as a
 * JSON string to be freed with `susyhom_string_free`. Pass `enumerate`
 * nonzero for exact counting instead of seeded sampling.
 */
enum SusyhomStatus susyhom_qbne_json(const struct SusyhomComplex *c,
                                     size_t level,
                                     double b,
                                     double delta,
                                     double eps,
                                     double mu,
                                     uint64_t seed,
                                     int32_t enumerate,
                                     char **out);

/**
 * Release a string returned by this library.
 */
void susyhom_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUSYHOM_H */
