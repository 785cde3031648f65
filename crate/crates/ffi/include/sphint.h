#ifndef SPHINT_H
#define SPHINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SphintContinuousKind {
  /**
   * `K = c`
   */
  SPHINT_CONTINUOUS_KIND_CONSTANT = 0,
  /**
   * `K = sin(c |x - y|)`
   */
  SPHINT_CONTINUOUS_KIND_SIN = 1,
  /**
   * `K = cos(c |x - y|)`
   */
  SPHINT_CONTINUOUS_KIND_COS = 2,
} SphintContinuousKind;

typedef enum SphintKernelFamily {
  SPHINT_KERNEL_FAMILY_ONE = 0,
  SPHINT_KERNEL_FAMILY_ALGEBRAIC = 1,
  SPHINT_KERNEL_FAMILY_LOG = 2,
  SPHINT_KERNEL_FAMILY_MIXED = 3,
} SphintKernelFamily;

typedef enum SphintStatus {
  SPHINT_STATUS_OK = 0,
  /**
   * A parameter is out of range or malformed.
   */
  SPHINT_STATUS_INVALID_ARGUMENT = 1,
  SPHINT_STATUS_IO = 2,
  /**
   * The stage-1 matrix is singular to working precision.
   */
  SPHINT_STATUS_SINGULAR = 3,
  SPHINT_STATUS_NUMERICAL = 4,
  SPHINT_STATUS_NULL_POINTER = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  SPHINT_STATUS_INTERNAL = 6,
} SphintStatus;

/**
 * Opaque quadrature rule.
 */
typedef struct SphintRule SphintRule;

/**
 * Opaque stage-1 solution; evaluates the stage-2 interpolant.
 */
typedef struct SphintSolution SphintSolution;

/**
 * Singular factor `h`. `nu1` is the exponent of the algebraic family and
 * the `|x - y|` exponent of the mixed family; `nu2` is the `|x + y|`
 * exponent of the mixed family.
 */
typedef struct SphintKernel {
  enum SphintKernelFamily family;
  double nu1;
  double nu2;
} SphintKernel;

typedef struct SphintContinuous {
  enum SphintContinuousKind kind;
  double c;
} SphintContinuous;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sphint_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sphint_version(void);

/**
 * Loads a point file. With `weights_from_file` nonzero the fourth column
 * supplies the weights; otherwise all weights are `4π/m`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum SphintStatus sphint_rule_load(const char *path,
                                   int32_t weights_from_file,
                                   struct SphintRule **out);

/**
 * Equal-area points with equal weights.
 *
 * # Safety
 * `out` must be writable.
 */
enum SphintStatus sphint_rule_equal_area(size_t m, struct SphintRule **out);

/**
 * Rule from `m` points stored as `xyz[3j..3j+3]` (normalized on input).
 * `weights` may be NULL for equal weights `4π/m`.
 *
 * # Safety
 * `xyz` must hold `3m` doubles, `weights` (if non-null) `m`, and `out`
 * must be writable.
 */
enum SphintStatus sphint_rule_from_arrays(const double *xyz,
                                          const double *weights,
                                          size_t m,
                                          struct SphintRule **out);

/**
 * Number of points, or 0 for NULL.
 *
 * # Safety
 * `rule` must be NULL or a live handle.
 */
size_t sphint_rule_len(const struct SphintRule *rule);

/**
 * Copies the weights into `out[0..m]`.
 *
 * # Safety
 * `rule` must be a live handle and `out` hold `sphint_rule_len(rule)`
 * doubles.
 */
enum SphintStatus sphint_rule_weights(const struct SphintRule *rule, double *out);

/**
 * # Safety
 * `rule` must be NULL or a handle not yet freed.
 */
void sphint_rule_free(struct SphintRule *rule);

/**
 * Marcinkiewicz–Zygmund constant of the rule at degree `n`.
 *
 * # Safety
 * `rule` must be a live handle and `eta` writable.
 */
enum SphintStatus sphint_mz_eta(const struct SphintRule *rule, size_t n, double *eta);

/**
 * Modified moments `μ_0..μ_n` into `out[0..=n]`.
 *
 * # Safety
 * `out` must hold `n + 1` doubles.
 */
enum SphintStatus sphint_moments(struct SphintKernel kernel, size_t n, double *out);

/**
 * Solves stage 1 for constant right-hand side `f` at degree `n`.
 *
 * # Safety
 * `rule` must be a live handle and `out` writable.
 */
enum SphintStatus sphint_solve(const struct SphintRule *rule,
                               struct SphintKernel kernel,
                               struct SphintContinuous k,
                               double f,
                               size_t n,
                               struct SphintSolution **out);

/**
 * Number of nodal values, or 0 for NULL.
 *
 * # Safety
 * `sol` must be NULL or a live handle.
 */
size_t sphint_solution_len(const struct SphintSolution *sol);

/**
 * Copies the stage-1 nodal values into `out`.
 *
 * # Safety
 * `out` must hold `sphint_solution_len(sol)` doubles.
 */
enum SphintStatus sphint_solution_nodal_values(const struct SphintSolution *sol, double *out);

/**
 * Stage-2 value at the direction `(x, y, z)` (normalized on input).
 *
 * # Safety
 * `sol` must be a live handle and `value` writable.
 */
enum SphintStatus sphint_solution_evaluate(const struct SphintSolution *sol,
                                           double x,
                                           double y,
                                           double z,
                                           double *value);

/**
 * Stage-1 residual `||M φ - b||_∞` and the MZ constant of the run.
 *
 * # Safety
 * `sol` must be a live handle; `residual` and `eta` may be NULL.
 */
enum SphintStatus sphint_solution_diagnostics(const struct SphintSolution *sol,
                                              double *residual,
                                              double *eta);

/**
 * # Safety
 * `sol` must be NULL or a handle not yet freed.
 */
void sphint_solution_free(struct SphintSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHINT_H */
