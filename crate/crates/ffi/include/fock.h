#ifndef FOCK_H
#define FOCK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FockStatus {
  FOCK_STATUS_OK = 0,
  FOCK_STATUS_NULL_POINTER = 1,
  FOCK_STATUS_DIMENSION_MISMATCH = 2,
  FOCK_STATUS_NOT_SYMMETRIC = 3,
  FOCK_STATUS_NOT_POSITIVE_DEFINITE = 4,
  FOCK_STATUS_NUMERICAL_BREAKDOWN = 5,
  FOCK_STATUS_RANGE = 6,
  FOCK_STATUS_DIVERGENT = 7,
  FOCK_STATUS_REQUIRES_REAL_FORM = 8,
  FOCK_STATUS_UNSUPPORTED_FORM = 9,
  FOCK_STATUS_QUADRATURE_BUDGET = 10,
  FOCK_STATUS_NON_FINITE = 11,
  FOCK_STATUS_INVALID_INPUT = 12,
  FOCK_STATUS_PANIC = 13,
} FockStatus;

/**
 * Opaque operator context.
 */
typedef struct FockContext FockContext;

typedef struct FockComplex {
  double re;
  double im;
} FockComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a context from the 2n×2n row-major matrix of A in the (x, y) basis.
 *
 * # Safety
 * `a` must point to 4n² doubles and `out` must be writable.
 */
enum FockStatus fock_context_new(size_t n, const double *a, struct FockContext **out);

/**
 * Builds a context for A = diag(R, T) from two n×n row-major blocks.
 *
 * # Safety
 * `r` and `t` must each point to n² doubles and `out` must be writable.
 */
enum FockStatus fock_context_from_blocks(size_t n,
                                         const double *r,
                                         const double *t,
                                         struct FockContext **out);

/**
 * Releases a context. Null is ignored.
 *
 * # Safety
 * `ctx` must come from a constructor in this library and not be used afterwards.
 */
void fock_context_free(struct FockContext *ctx);

/**
 * Complex dimension n, or 0 for a null handle.
 *
 * # Safety
 * `ctx` must be null or a live handle.
 */
size_t fock_context_dim(const struct FockContext *ctx);

/**
 * Whether A maps the real subspace into itself.
 *
 * # Safety
 * `ctx` must be null or a live handle.
 */
bool fock_context_real_preserving(const struct FockContext *ctx);

/**
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
enum FockStatus fock_c_a(const struct FockContext *ctx, double *out);

/**
 * K_A(z, w).
 *
 * # Safety
 * `z` and `w` must point to 2n doubles and `out` must be writable.
 */
enum FockStatus fock_kernel(const struct FockContext *ctx,
                            const double *z,
                            const double *w,
                            struct FockComplex *out);

/**
 * Density of the Gaussian measure defining the space, at z.
 *
 * # Safety
 * `z` must point to 2n doubles and `out` must be writable.
 */
enum FockStatus fock_measure_density(const struct FockContext *ctx, const double *z, double *out);

/**
 * Norm of the evaluation functional at z.
 *
 * # Safety
 * `z` must point to 2n doubles and `out` must be writable.
 */
enum FockStatus fock_eval_norm(const struct FockContext *ctx, const double *z, double *out);

/**
 * Coherent state c(x, z) for real x ∈ ℝⁿ. Needs a real-preserving A.
 *
 * # Safety
 * `x` must point to n doubles, `z` to 2n doubles, and `out` must be writable.
 */
enum FockStatus fock_coherent_state(const struct FockContext *ctx,
                                    const double *x,
                                    const double *z,
                                    struct FockComplex *out);

/**
 * log c_{A_k}⁻¹ for k = 1..len along diagonal truncations with entries r_k, t_k.
 *
 * # Safety
 * `r`, `t` and `out` must each point to `len` doubles.
 */
enum FockStatus fock_truncation_log_inv_ca(const double *r,
                                           const double *t,
                                           size_t len,
                                           double *out);

/**
 * Runs the verification suite. `nodes` = 0 selects the default rule size.
 *
 * # Safety
 * `checks` and `failed` must be writable.
 */
enum FockStatus fock_verify(uint64_t seed, size_t nodes, size_t *checks, size_t *failed);

/**
 * Message for the most recent failure on this thread; empty if none.
 * Valid until the next failing call on the same thread.
 */
const char *fock_last_error_message(void);

/**
 * Stable snake_case name of a status code.
 */
const char *fock_status_name(enum FockStatus status);

const char *fock_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCK_H */
