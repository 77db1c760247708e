#ifndef SOLENOID_GAP_H
#define SOLENOID_GAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `Positive` is Gap, Ergodic or StronglyErgodic; `Negative` their negations.
 */
typedef enum SgOutcome {
  SG_OUTCOME_POSITIVE = 0,
  SG_OUTCOME_NEGATIVE = 1,
  SG_OUTCOME_UNDECIDED = 2,
} SgOutcome;

typedef enum SgQuestion {
  SG_QUESTION_GAP = 0,
  SG_QUESTION_ERGODIC = 1,
  SG_QUESTION_STRONG = 2,
} SgQuestion;

typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_UTF8 = 2,
  SG_STATUS_INVALID_INPUT = 3,
  SG_STATUS_DECISION_FAILED = 4,
  SG_STATUS_SIMULATION_FAILED = 5,
  SG_STATUS_PANIC = 6,
} SgStatus;

/**
 * A validated problem: the solenoid and its affine generators.
 */
typedef struct SgProblem SgProblem;

/**
 * A verdict together with the problem it answers.
 */
typedef struct SgVerdict SgVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; never null, empty if none.
 */
const char *sg_last_error_message(void);

const char *sg_version(void);

/**
 * Parses and validates a JSON problem description.
 */
enum SgStatus sg_problem_from_json(const char *json, struct SgProblem **out);

void sg_problem_free(struct SgProblem *problem);

/**
 * Decides `question` for `problem`; the verdict must be released with [`sg_verdict_free`].
 */
enum SgStatus sg_decide(const struct SgProblem *problem,
                        enum SgQuestion question,
                        uint64_t seed,
                        struct SgVerdict **out);

enum SgStatus sg_verdict_outcome(const struct SgVerdict *verdict, enum SgOutcome *out);

/**
 * Verdict tag such as `"NoGap"`; valid while the verdict is alive, null for a null verdict.
 */
const char *sg_verdict_tag(const struct SgVerdict *verdict);

/**
 * Certificate JSON for the verdict; release with [`sg_string_free`].
 */
enum SgStatus sg_verdict_certificate_json(const struct SgVerdict *verdict, char **out);

void sg_verdict_free(struct SgVerdict *verdict);

/**
 * Sets `*verified` to whether the certificate document checks out.
 */
enum SgStatus sg_verify_certificate(const char *json, bool *verified);

/**
 * Power-iteration estimate of the top of the averaging operator on one truncation.
 */
enum SgStatus sg_estimate_top(const struct SgProblem *problem,
                              uint64_t height,
                              uint32_t power,
                              size_t max_iters,
                              double tol,
                              double *lambda);

void sg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLENOID_GAP_H */
