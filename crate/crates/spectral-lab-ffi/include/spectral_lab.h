/* C ABI for the spectral-lab toolkit. */

#ifndef SPECTRAL_LAB_H
#define SPECTRAL_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes for every fallible call.
typedef enum slab_status_t {
  SLAB_STATUS_T_OK = 0,
  SLAB_STATUS_T_NULL_POINTER = 1,
  SLAB_STATUS_T_INVALID_UTF8 = 2,
  SLAB_STATUS_T_INVALID_INPUT = 3,
  SLAB_STATUS_T_NON_CONVERGENCE = 4,
  SLAB_STATUS_T_AMBIGUOUS_CLUSTERING = 5,
  SLAB_STATUS_T_SINGULAR = 6,
  SLAB_STATUS_T_OUTSIDE_BALL = 7,
  SLAB_STATUS_T_NO_FEASIBLE_DISC = 8,
  SLAB_STATUS_T_NOT_CYCLIC = 9,
  SLAB_STATUS_T_NOT_SINGLE_EIGENVALUE = 10,
  SLAB_STATUS_T_THETA_VIOLATED = 11,
  SLAB_STATUS_T_INCONSISTENT_SANDWICH = 12,
  SLAB_STATUS_T_INCONCLUSIVE = 13,
  SLAB_STATUS_T_DEGENERATE_DENOMINATOR = 14,
  SLAB_STATUS_T_VERIFICATION_FAILED = 15,
  SLAB_STATUS_T_INTERNAL = 16,
} slab_status_t;

// Opaque dense complex matrix handle.
typedef struct slab_matrix_t slab_matrix_t;

// Opaque symmetrized-coordinates point handle.
typedef struct slab_point_t slab_point_t;

// Plain-value run configuration; `degree = 0` means the 2n default.
typedef struct slab_config_t {
  double tol;
  uintptr_t grid;
  uintptr_t degree;
  uintptr_t restarts;
  uint64_t seed;
  double margin;
  uintptr_t directions;
} slab_config_t;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The library defaults, handy for C callers.
struct slab_config_t slab_config_default(void);

// Thread-local message describing the most recent failure on this thread,
// or NULL when no failure has been recorded. The pointer stays valid until
// the next failing call on the same thread.
const char *slab_last_error_message(void);

// Parses a matrix from its JSON schema {"n", "re": [[...]], "im": [[...]]}.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum slab_status_t slab_matrix_from_json(const char *json, struct slab_matrix_t **out);

// # Safety
// `m` must come from `slab_matrix_from_json` and not be freed twice.
void slab_matrix_free(struct slab_matrix_t *m);

// Dimension of a matrix handle; 0 for NULL.
//
// # Safety
// `m` must be a live handle or NULL.
uintptr_t slab_matrix_dim(const struct slab_matrix_t *m);

// Parses a point from its JSON schema {"n", "re": [...], "im": [...]}.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum slab_status_t slab_point_from_json(const char *json, struct slab_point_t **out);

// # Safety
// `p` must come from `slab_point_from_json` and not be freed twice.
void slab_point_free(struct slab_point_t *p);

// Releases a string returned by any `_json` call.
//
// # Safety
// `s` must come from this library and not be freed twice.
void slab_string_free(char *s);

// Symmetric functions of the eigenvalues as point JSON.
//
// # Safety
// `a` must be a live handle, `out_json` a valid pointer.
enum slab_status_t slab_sigma_json(const struct slab_matrix_t *a, char **out_json);

// Cyclicity test: writes 1 or 0 to `out`.
//
// # Safety
// `a` must be a live handle, `out` a valid pointer.
enum slab_status_t slab_is_cyclic(const struct slab_matrix_t *a, double tol, int32_t *out);

// Spectral lower bound for the Lempert function at (a, b).
//
// # Safety
// `a` and `b` must be live handles, `out` a valid pointer.
enum slab_status_t slab_bharali_lower(const struct slab_matrix_t *a,
                                      const struct slab_matrix_t *b,
                                      double tol,
                                      double *out);

// Caratheodory lower bound on the 3-dimensional symmetrized polydisc.
//
// # Safety
// `s` and `t` must be live handles, `out` a valid pointer.
enum slab_status_t slab_caratheodory_lb_g3(const struct slab_point_t *s,
                                           const struct slab_point_t *t,
                                           uintptr_t grid,
                                           double *out);

// Safe Euclidean inclusion radius of the symmetrized polydisc.
//
// # Safety
// `out` must be a valid pointer.
enum slab_status_t slab_ball_radius(uintptr_t n, uintptr_t directions, uint64_t seed, double *out);

// Disc search through two points; returns {"alpha", "disc"} JSON.
//
// # Safety
// `s`, `t` must be live handles, `cfg` and `out_json` valid pointers.
enum slab_status_t slab_disc_search_json(const struct slab_point_t *s,
                                         const struct slab_point_t *t,
                                         const struct slab_config_t *cfg,
                                         char **out_json);

// Full sandwich report for a pair of matrices, as JSON.
//
// # Safety
// `a`, `b` must be live handles, `cfg` and `out_json` valid pointers.
enum slab_status_t slab_sandwich_report_json(const struct slab_matrix_t *a,
                                             const struct slab_matrix_t *b,
                                             const struct slab_config_t *cfg,
                                             char **out_json);

// Residual of the closed-form symmetric functions of the perturbed block.
// `j` points at `j_len` superdiagonal positions (may be NULL when empty).
//
// # Safety
// `j` must reference `j_len` readable entries; out pointers must be valid.
enum slab_status_t slab_det_identity(uintptr_t m,
                                     const uintptr_t *j,
                                     uintptr_t j_len,
                                     double delta,
                                     double *out_residual,
                                     double *out_sign);

// Discontinuity certificate as JSON; `Inconclusive` when the gap does not
// close.
//
// # Safety
// Array arguments must reference the stated lengths; pointers valid.
enum slab_status_t slab_discontinuity_certificate_json(uintptr_t m,
                                                       const uintptr_t *j,
                                                       uintptr_t j_len,
                                                       double delta,
                                                       const uint32_t *j_list,
                                                       uintptr_t j_list_len,
                                                       int32_t auto_shrink,
                                                       const struct slab_config_t *cfg,
                                                       char **out_json);

// First worked example as a certificate JSON.
//
// # Safety
// `cfg` and `out_json` must be valid pointers.
enum slab_status_t slab_example51_json(double eps,
                                       const struct slab_config_t *cfg,
                                       char **out_json);

// Second worked example as a bound-report JSON.
//
// # Safety
// `cfg` and `out_json` must be valid pointers.
enum slab_status_t slab_example52_json(double mu_re,
                                       double mu_im,
                                       const struct slab_config_t *cfg,
                                       char **out_json);

// Lempert-vs-Green chain report as JSON; `Inconclusive` when the gap is
// below the margin.
//
// # Safety
// `a` must be a live handle, `cfg` and `out_json` valid pointers.
enum slab_status_t slab_green_chain_json(const struct slab_matrix_t *a,
                                         double mu_re,
                                         double mu_im,
                                         double alpha_re,
                                         double alpha_im,
                                         const struct slab_config_t *cfg,
                                         char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_LAB_H */
