#ifndef UNIPD_H
#define UNIPD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UnipdSolver {
  UNIPD_SOLVER_UNIPD = 0,
  UNIPD_SOLVER_ACC_UNIPD = 1,
  UNIPD_SOLVER_FW_HARMONIC = 2,
  UNIPD_SOLVER_FW_LINESEARCH = 3,
} UnipdSolver;

typedef enum UnipdStatus {
  UNIPD_STATUS_OK = 0,
  UNIPD_STATUS_NULL_ARGUMENT = 1,
  UNIPD_STATUS_INVALID_ARGUMENT = 2,
  UNIPD_STATUS_PARSE = 3,
  UNIPD_STATUS_UNSUPPORTED = 4,
  UNIPD_STATUS_SOLVER_FAILURE = 5,
  UNIPD_STATUS_IO = 6,
  UNIPD_STATUS_BUFFER_SIZE = 7,
  UNIPD_STATUS_PANIC = 8,
} UnipdStatus;

typedef enum UnipdTermination {
  UNIPD_TERMINATION_MAX_ITERATIONS = 0,
  UNIPD_TERMINATION_PRACTICAL_STOP = 1,
  UNIPD_TERMINATION_STATIONARY_DUAL = 2,
} UnipdTermination;

/**
 * Opaque problem handle.
 */
typedef struct UnipdProblem UnipdProblem;

/**
 * Opaque solver result handle.
 */
typedef struct UnipdResult UnipdResult;

/**
 * Solver settings; obtain defaults from [`unipd_default_options`].
 */
typedef struct UnipdOptions {
  enum UnipdSolver solver;
  double epsilon;
  /**
   * Initial smoothness estimate; `<= 0` probes it.
   */
  double m_init;
  size_t k_max;
  size_t i_max;
  /**
   * Nonzero enables the practical stopping rule.
   */
  int32_t practical_stop;
  double spectral_tol;
  uint64_t seed;
} UnipdOptions;

/**
 * One row of a trace.
 */
typedef struct UnipdRecord {
  size_t k;
  double m;
  size_t i;
  double objective;
  double feasibility;
  double g_value;
  size_t queries;
} UnipdRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *unipd_last_error_message(void);

struct UnipdOptions unipd_default_options(void);

/**
 * Parses a JSON problem file (explicit or generated) into `*out`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum UnipdStatus unipd_problem_from_json(const char *json, struct UnipdProblem **out);

/**
 * Dimension of the primal variable, 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t unipd_problem_primal_dim(const struct UnipdProblem *problem);

/**
 * Dimension of the multiplier, 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t unipd_problem_dual_dim(const struct UnipdProblem *problem);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void unipd_problem_free(struct UnipdProblem *problem);

/**
 * Runs the selected solver; `options` may be null for the defaults.
 *
 * # Safety
 * `problem` must be a live handle, `options` null or valid, `out` valid.
 */
enum UnipdStatus unipd_solve(const struct UnipdProblem *problem,
                             const struct UnipdOptions *options,
                             struct UnipdResult **out);

/**
 * Number of recorded iterations, 0 for a null handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t unipd_result_iterations(const struct UnipdResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
enum UnipdTermination unipd_result_termination(const struct UnipdResult *result);

/**
 * Copies trace row `k` into `*out`.
 *
 * # Safety
 * `result` must be a live handle and `out` valid.
 */
enum UnipdStatus unipd_result_record(const struct UnipdResult *result,
                                     size_t k,
                                     struct UnipdRecord *out);

/**
 * Copies the averaged primal point; `len` must equal the primal dimension.
 *
 * # Safety
 * `result` must be a live handle and `buf` writable for `len` doubles.
 */
enum UnipdStatus unipd_result_primal(const struct UnipdResult *result, double *buf, size_t len);

/**
 * Copies the final multiplier; `len` must equal the dual dimension.
 *
 * # Safety
 * `result` must be a live handle and `buf` writable for `len` doubles.
 */
enum UnipdStatus unipd_result_dual(const struct UnipdResult *result, double *buf, size_t len);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void unipd_result_free(struct UnipdResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIPD_H */
