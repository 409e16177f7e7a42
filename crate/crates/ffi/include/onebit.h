#ifndef ONEBIT_H
#define ONEBIT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OnebitStatus {
  ONEBIT_STATUS_OK = 0,
  ONEBIT_STATUS_NULL_POINTER = 1,
  ONEBIT_STATUS_INVALID_ARGUMENT = 2,
  ONEBIT_STATUS_INVALID_DISTRIBUTION = 3,
  ONEBIT_STATUS_INVALID_STATE = 4,
  ONEBIT_STATUS_DIMENSION = 5,
  ONEBIT_STATUS_NOT_HERMITIAN = 6,
  ONEBIT_STATUS_INVALID_TRACE = 7,
  ONEBIT_STATUS_OVERFLOW = 8,
  ONEBIT_STATUS_NUMERICAL = 9,
  ONEBIT_STATUS_PANIC = 10,
} OnebitStatus;

typedef enum OnebitStrategy {
  ONEBIT_STRATEGY_FIXED_BASIS = 0,
  ONEBIT_STRATEGY_SAMPLED = 1,
  ONEBIT_STRATEGY_EIGEN_DIRECTED = 2,
  ONEBIT_STRATEGY_EIGEN_ORACLE = 3,
} OnebitStrategy;

/**
 * Opaque handle to a validated Hermitian unit-trace matrix.
 */
typedef struct OnebitOperator OnebitOperator;

/**
 * Result of a positivity test.
 */
typedef struct OnebitPositivity {
  bool positive;
  /**
   * Witness pair indices, or -1 when there is none.
   */
  int64_t pair_i;
  int64_t pair_j;
  /**
   * Principal 2x2 minor of the witness pair, NaN when there is none.
   */
  double minor;
  /**
   * Smallest eigenvalue for the oracle strategy, NaN otherwise.
   */
  double min_eigenvalue;
} OnebitPositivity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *onebit_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *onebit_version(void);

/**
 * Normalized degree-`alpha` entropy of `probs[0..len]`.
 *
 * # Safety
 * `probs` must point to `len` doubles; `out` must be writable.
 */
enum OnebitStatus onebit_entropy(const double *probs, size_t len, double alpha, double *out);

/**
 * Sum of binary entropies `H(p_u, 1 - p_u)` over `pairs[0..len]`.
 *
 * # Safety
 * `pairs` must point to `len` doubles; `out` must be writable.
 */
enum OnebitStatus onebit_total_uncertainty(const double *pairs,
                                           size_t len,
                                           double alpha,
                                           double *out);

/**
 * Degrees of freedom of an `n`-level system with `m` outcomes per measurement.
 *
 * # Safety
 * `out` must be writable.
 */
enum OnebitStatus onebit_degrees_of_freedom(uint64_t n, uint64_t m, uint64_t *out);

/**
 * `cos²(theta / 2)`.
 */
double onebit_malus_probability(double theta);

/**
 * Builds an operator from row-major `n*n` real and imaginary parts.
 * Hermiticity and unit trace are checked.
 *
 * # Safety
 * `re` and `im` must each point to `n*n` doubles; `out` must be writable.
 */
enum OnebitStatus onebit_operator_new(size_t n,
                                      const double *re,
                                      const double *im,
                                      struct OnebitOperator **out);

/**
 * Releases an operator. Null is ignored.
 *
 * # Safety
 * `op` must be null or a handle from [`onebit_operator_new`] not yet freed.
 */
void onebit_operator_free(struct OnebitOperator *op);

/**
 * Dimension of the operator, or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle.
 */
size_t onebit_operator_dim(const struct OnebitOperator *op);

/**
 * Positivity test. `strategy` is an [`OnebitStrategy`] value; `n_bases`
 * and `seed` only matter for the sampled and eigen-directed strategies.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum OnebitStatus onebit_positivity_check(const struct OnebitOperator *op,
                                          int32_t strategy,
                                          size_t n_bases,
                                          uint64_t seed,
                                          double tol,
                                          struct OnebitPositivity *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONEBIT_H */
