#ifndef SIMPLICIAL_SPECTRA_H
#define SIMPLICIAL_SPECTRA_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SsStatus {
  SS_OK = 0,
  SS_NULL_POINTER = 1,
  SS_INVALID_ARGUMENT = 2,
  SS_INVALID_COMPLEX = 3,
  SS_UNSUPPORTED = 4,
  SS_SINGULAR = 5,
  SS_BUDGET = 6,
  SS_INVARIANT = 7,
  SS_OVERFLOW = 8,
  SS_BUFFER_TOO_SMALL = 9,
  SS_PANIC = 10,
} SsStatus;

/**
 * Subdivision kinds. `SS_EDGEWISE` takes the parameter `r`.
 */
typedef enum SsKind {
  SS_CONE = 0,
  SS_BARYCENTRIC = 1,
  SS_EDGEWISE = 2,
} SsKind;

/**
 * A simplicial complex.
 */
typedef struct SsComplex SsComplex;

/**
 * A quantile function on `[0, 1]`.
 */
typedef struct SsStepFunction SsStepFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`) and returns its full length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t ss_last_error(char *buf, size_t cap);

/**
 * Builds a complex from `n_facets` facets of `facet_size` vertices each,
 * stored row by row in `vertices`.
 *
 * # Safety
 * `vertices` must point to `n_facets * facet_size` values; `out` must be writable.
 */
enum SsStatus ss_complex_new(const uint32_t *vertices,
                             size_t n_facets,
                             size_t facet_size,
                             struct SsComplex **out);

/**
 * Parses `{"facets": [[...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SsStatus ss_complex_from_json(const char *json, struct SsComplex **out);

/**
 * # Safety
 * `c` must be null or a handle from this library not yet freed.
 */
void ss_complex_free(struct SsComplex *c);

/**
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_complex_dim(const struct SsComplex *c, size_t *out);

/**
 * Face counts by dimension.
 *
 * # Safety
 * `c` must be a live handle; see the buffer convention for the rest.
 */
enum SsStatus ss_complex_f_vector(const struct SsComplex *c,
                                  size_t *buf,
                                  size_t cap,
                                  size_t *len_out);

/**
 * Applies the subdivision `n` times.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_complex_subdivide(const struct SsComplex *c,
                                   enum SsKind kind,
                                   uint32_t r,
                                   size_t n,
                                   struct SsComplex **out);

/**
 * Quantile function of the top-dimensional Laplacian spectrum.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_complex_top_quantile(const struct SsComplex *c, struct SsStepFunction **out);

/**
 * # Safety
 * `f` must be null or a handle from this library not yet freed.
 */
void ss_step_function_free(struct SsStepFunction *f);

/**
 * Number of steps.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_step_function_len(const struct SsStepFunction *f, size_t *out);

/**
 * Step endpoints and values. All three buffers share `cap`; the length is
 * written to `len_out`.
 *
 * # Safety
 * `f` must be a live handle; each buffer must be null or hold `cap` values.
 */
enum SsStatus ss_step_function_steps(const struct SsStepFunction *f,
                                     double *left,
                                     double *right,
                                     double *value,
                                     size_t cap,
                                     size_t *len_out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_step_function_eval(const struct SsStepFunction *f, double x, double *out);

/**
 * L1 distance on `[0, 1]` with exact breakpoints.
 *
 * # Safety
 * `f` and `g` must be live handles; `out` must be writable.
 */
enum SsStatus ss_l1_distance(const struct SsStepFunction *f,
                             const struct SsStepFunction *g,
                             double *out);

/**
 * Limit quantile function for cone subdivision of the d-simplex, truncated
 * at `depth` and rescaled to `[0, 1]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SsStatus ss_limit_quantile_cd(size_t d, size_t depth, struct SsStepFunction **out);

/**
 * Adjacency eigenvalues of the level-n Schreier graph, ascending.
 *
 * # Safety
 * See the buffer convention.
 */
enum SsStatus ss_schreier_spectrum(size_t d, size_t n, double *buf, size_t cap, size_t *len_out);

/**
 * Predicted distinct adjacency eigenvalues with multiplicities. Both
 * buffers share `cap`.
 *
 * # Safety
 * See the buffer convention.
 */
enum SsStatus ss_predicted_spectrum(size_t d,
                                    size_t n,
                                    double *values,
                                    uint64_t *multiplicities,
                                    size_t cap,
                                    size_t *len_out);

/**
 * One step of the two-parameter renormalization map.
 *
 * # Safety
 * `mu_out` and `lambda_out` must be writable.
 */
enum SsStatus ss_renormalize(size_t d,
                             double mu,
                             double lambda,
                             double *mu_out,
                             double *lambda_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIMPLICIAL_SPECTRA_H */
