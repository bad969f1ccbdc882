#ifndef RESCUE_PLANNER_H
#define RESCUE_PLANNER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_ARGUMENT = 2,
  RP_STATUS_PARSE = 3,
  RP_STATUS_INFEASIBLE = 4,
  RP_STATUS_TOO_LARGE = 5,
  RP_STATUS_BOUND_VIOLATED = 6,
  RP_STATUS_SIMULATION = 7,
  RP_STATUS_PANIC = 8,
} RpStatus;

typedef enum RpPolicy {
  RP_POLICY_GREEDY_HR = 0,
  RP_POLICY_GREEDY_FTG = 1,
  RP_POLICY_GREEDY_CR = 2,
  RP_POLICY_GITTINS = 3,
  RP_POLICY_PTP = 4,
} RpPolicy;

/**
 * Opaque static instance.
 */
typedef struct RpSnapshot RpSnapshot;

/**
 * Opaque solver result.
 */
typedef struct RpSolution RpSolution;

typedef struct RpBoundReport {
  double gap;
  double bound;
  double static_optimum;
  double dynamic_optimum;
} RpBoundReport;

typedef struct RpTrialConfig {
  uint32_t rows;
  uint32_t row_length;
  uint32_t free_margin;
  uint32_t n_robots;
  double p_min;
  double p_max;
  /**
   * Field layout, 1 to 5.
   */
  uint8_t field_pattern;
  uint64_t field_seed;
  /**
   * An `RpPolicy` value.
   */
  uint32_t policy;
  double mu;
  double gamma_p;
  double gamma_g;
} RpTrialConfig;

typedef struct RpTrialResult {
  uint64_t completion_time;
  uint64_t working_time;
} RpTrialResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next call on the same thread.
 */
const char *rp_last_error(void);

/**
 * Builds a snapshot for `n` robots from `n + 2` rewards and a row-major
 * `(n + 2) * (n + 2)` cost matrix.
 *
 * # Safety
 * `rewards` and `costs` must point to that many readable doubles and `out`
 * must be writable.
 */
enum RpStatus rp_snapshot_new(size_t n,
                              const double *rewards,
                              const double *costs,
                              struct RpSnapshot **out);

/**
 * Parses a snapshot from instance text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum RpStatus rp_snapshot_parse(const char *text, struct RpSnapshot **out);

/**
 * # Safety
 * `snapshot` must come from this library and not be freed twice. Null is
 * ignored.
 */
void rp_snapshot_free(struct RpSnapshot *snapshot);

/**
 * Robot count of a snapshot, or 0 for null.
 *
 * # Safety
 * `snapshot` must be null or a live handle.
 */
size_t rp_snapshot_robot_count(const struct RpSnapshot *snapshot);

/**
 * Solves with branch and bound.
 *
 * # Safety
 * `snapshot` must be a live handle and `out` writable.
 */
enum RpStatus rp_solve_bnb(const struct RpSnapshot *snapshot, struct RpSolution **out);

/**
 * Solves with subset dynamic programming.
 *
 * # Safety
 * `snapshot` must be a live handle and `out` writable.
 */
enum RpStatus rp_solve_dp(const struct RpSnapshot *snapshot, struct RpSolution **out);

/**
 * # Safety
 * `solution` must come from this library and not be freed twice. Null is
 * ignored.
 */
void rp_solution_free(struct RpSolution *solution);

/**
 * Objective value, or NaN for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double rp_solution_objective(const struct RpSolution *solution);

/**
 * Number of vertices on the path, endpoints included; 0 for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t rp_solution_path_len(const struct RpSolution *solution);

/**
 * Copies the path vertex indices into `buf`.
 *
 * # Safety
 * `solution` must be a live handle and `buf` must hold `capacity` entries.
 */
enum RpStatus rp_solution_path(const struct RpSolution *solution, size_t *buf, size_t capacity);

/**
 * Draws a random drifting graph with `n` robots from `seed` and compares
 * its static and dynamic optima against the gap bound. Returns
 * `RP_STATUS_BOUND_VIOLATED` with `out` filled when the bound fails.
 *
 * # Safety
 * `out` must be writable.
 */
enum RpStatus rp_verify_bound(size_t n,
                              double alpha,
                              double beta,
                              double lambda,
                              uint64_t seed,
                              struct RpBoundReport *out);

/**
 * Default farm and policy settings.
 */
struct RpTrialConfig rp_trial_config_default(void);

/**
 * Runs one closed-loop trial to completion.
 *
 * # Safety
 * `config` must be readable and `out` writable.
 */
enum RpStatus rp_run_trial(const struct RpTrialConfig *config,
                           uint64_t trial_seed,
                           struct RpTrialResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESCUE_PLANNER_H */
