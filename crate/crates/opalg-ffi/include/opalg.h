#ifndef OPALG_H
#define OPALG_H

/* Generated by cbindgen from the opalg-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum OpalgStatus {
  OPALG_STATUS_OK = 0,
  OPALG_STATUS_NULL_POINTER = 1,
  OPALG_STATUS_INVALID_ARGUMENT = 2,
  OPALG_STATUS_SHAPE_MISMATCH = 3,
  OPALG_STATUS_NOT_INVERTIBLE = 4,
  OPALG_STATUS_HYPOTHESIS_NOT_MET = 5,
  OPALG_STATUS_NO_CONVERGENCE = 6,
  OPALG_STATUS_SINGULAR_STEP = 7,
  OPALG_STATUS_STRUCTURAL = 8,
  OPALG_STATUS_INTERNAL = 9,
} OpalgStatus;

// Opaque handle: a block algebra `⊕ᵢ M_{nᵢ}`.
typedef struct OpalgAlgebra OpalgAlgebra;

// Opaque handle: an element of a block algebra.
typedef struct OpalgElement OpalgElement;

// Opaque handle: a linear map between block algebras.
typedef struct OpalgLinMap OpalgLinMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the library; static storage, do not free.
const char *opalg_version(void);

// Message for the most recent error on this thread, or NULL; free with
// `opalg_string_free`.
char *opalg_last_error_message(void);

// Free a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned by an opalg function, not yet
// freed; NULL is ignored.
void opalg_string_free(char *s);

// Create the block algebra with the given block sizes.
//
// # Safety
// `dims` must point to `len` readable `usize` values; `out` must be a valid
// out-pointer.
enum OpalgStatus opalg_algebra_new(const size_t *dims, size_t len, struct OpalgAlgebra **out);

// Coordinate dimension `Σᵢ nᵢ²`.
//
// # Safety
// `alg` must be a live handle from `opalg_algebra_new`.
enum OpalgStatus opalg_algebra_coord_dim(const struct OpalgAlgebra *alg, size_t *out);

// # Safety
// `alg` must be a live handle, not freed twice; NULL is ignored.
void opalg_algebra_free(struct OpalgAlgebra *alg);

// Create an element from `2·coord_dim` interleaved `re, im` doubles.
//
// # Safety
// `re_im` must point to `len` readable doubles; handles must be live.
enum OpalgStatus opalg_element_new(const struct OpalgAlgebra *alg,
                                   const double *re_im,
                                   size_t len,
                                   struct OpalgElement **out);

// Haar-random unitary, deterministic in the seed.
//
// # Safety
// Handles must be live; `out` must be a valid out-pointer.
enum OpalgStatus opalg_random_unitary(const struct OpalgAlgebra *alg,
                                      uint64_t seed,
                                      struct OpalgElement **out);

// Copy the element's coordinates out as interleaved `re, im` doubles.
//
// # Safety
// `buf` must point to `len` writable doubles; `el` must be live.
enum OpalgStatus opalg_element_coords(const struct OpalgElement *el, double *buf, size_t len);

// Ambient operator norm.
//
// # Safety
// `el` must be live; `out` a valid out-pointer.
enum OpalgStatus opalg_element_op_norm(const struct OpalgElement *el, double *out);

// Distance from an invertible element to the unitary group.
//
// # Safety
// `el` must be live; `out` a valid out-pointer.
enum OpalgStatus opalg_element_polar_distance(const struct OpalgElement *el, double *out);

// # Safety
// `el` must be a live handle, not freed twice; NULL is ignored.
void opalg_element_free(struct OpalgElement *el);

// Create a linear map from `2·(dim_cod·dim_dom)` interleaved doubles,
// row-major over the matrix-unit coordinates.
//
// # Safety
// `re_im` must point to `len` readable doubles; handles must be live.
enum OpalgStatus opalg_linmap_new(const struct OpalgAlgebra *domain,
                                  const struct OpalgAlgebra *codomain,
                                  const double *re_im,
                                  size_t len,
                                  struct OpalgLinMap **out);

// The identity map on an algebra.
//
// # Safety
// `alg` must be live; `out` a valid out-pointer.
enum OpalgStatus opalg_linmap_identity(const struct OpalgAlgebra *alg, struct OpalgLinMap **out);

// Apply a map to an element; the result is a new element handle.
//
// # Safety
// Handles must be live; `out` a valid out-pointer.
enum OpalgStatus opalg_linmap_apply(const struct OpalgLinMap *map,
                                    const struct OpalgElement *el,
                                    struct OpalgElement **out);

// cb-norm estimate: writes the certified lower bound and the reported
// value.
//
// # Safety
// `map` must be live; out-pointers valid.
enum OpalgStatus opalg_linmap_cb_norm(const struct OpalgLinMap *map,
                                      size_t restarts,
                                      uint64_t seed,
                                      double *lower,
                                      double *value);

// μ of a map (requires the cb-norm product below √2).
//
// # Safety
// `map` must be live; `out` a valid out-pointer.
enum OpalgStatus opalg_linmap_mu(const struct OpalgLinMap *map,
                                 size_t restarts,
                                 uint64_t seed,
                                 double *out);

// Full defect report (norms, μ, both bounds, flags) as JSON.
//
// # Safety
// `map` must be live; `out_json` a valid out-pointer; free the string with
// `opalg_string_free`.
enum OpalgStatus opalg_defect_report_json(const struct OpalgLinMap *map,
                                          size_t restarts,
                                          uint64_t seed,
                                          char **out_json);

// Run the recovery pipeline; the report (residuals, trace, distances)
// crosses as JSON.
//
// # Safety
// `map` must be live; `out_json` a valid out-pointer; free the string with
// `opalg_string_free`.
enum OpalgStatus opalg_recover_report_json(const struct OpalgLinMap *map,
                                           size_t restarts,
                                           uint64_t seed,
                                           char **out_json);

// # Safety
// `map` must be a live handle, not freed twice; NULL is ignored.
void opalg_linmap_free(struct OpalgLinMap *map);

// Interval replay of the quantitative constant chain at δ, as JSON.
//
// # Safety
// `out_json` must be a valid out-pointer; free the string with
// `opalg_string_free`.
enum OpalgStatus opalg_quant_chain_json(double delta, char **out_json);

// The nuclear-stability threshold ledger as JSON.
//
// # Safety
// `out_json` must be a valid out-pointer.
enum OpalgStatus opalg_threshold_nuclear_json(char **out_json);

// The von Neumann threshold ledger (including the flagged discrepancy) as
// JSON.
//
// # Safety
// `out_json` must be a valid out-pointer.
enum OpalgStatus opalg_threshold_vn_json(char **out_json);

// The length-stability gate at `(ℓ, K)` as JSON.
//
// # Safety
// `out_json` must be a valid out-pointer.
enum OpalgStatus opalg_threshold_length_json(uint32_t ell, uint32_t k, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPALG_H */
