#ifndef QDB_H
#define QDB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdbStatus {
  QDB_STATUS_OK = 0,
  QDB_STATUS_NULL_POINTER = 1,
  // Index out of range, non-UTF-8 string or similar misuse.
  QDB_STATUS_INVALID_ARGUMENT = 2,
  // A value the model rejects, e.g. priors that do not sum to one.
  QDB_STATUS_VALIDATION = 3,
  QDB_STATUS_PARSE = 4,
  QDB_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  QDB_STATUS_PANIC = 6,
} QdbStatus;

typedef enum QdbFaceType {
  QDB_FACE_TYPE_WIDE = 0,
  QDB_FACE_TYPE_NARROW = 1,
} QdbFaceType;

// Pignistic probabilities, one per frame label in sorted order.
typedef struct QdbDistribution QdbDistribution;

typedef struct QdbExperimentSet QdbExperimentSet;

// Model settings: deliberation time, measurement weights and fit search range.
typedef struct QdbModel QdbModel;

typedef struct QdbPrediction {
  double p_attack_given_good;
  double p_attack_given_bad;
  double p_uncertain_given_good;
  double p_uncertain_given_bad;
  // Probability of attacking after categorizing.
  double p_total_cd;
  // Probability of attacking without categorizing.
  double p_attack_d_alone;
  double interference;
} QdbPrediction;

typedef struct QdbFitResult {
  double h_g;
  double h_b;
  double residual_good;
  double residual_bad;
  // Non-zero when a target lay outside the reachable range.
  int32_t clamped;
  struct QdbPrediction prediction;
} QdbFitResult;

typedef struct QdbExperiment {
  enum QdbFaceType face_type;
  double p_g;
  double p_attack_given_good;
  double p_b;
  double p_attack_given_bad;
  double p_t_observed;
  double p_attack_observed;
} QdbExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next library call on the same thread.
const char *qdb_last_error_message(void);

const char *qdb_version(void);

// Model with default settings (t = pi/2, weights 0.25 and 0.5, h in [-10, 10]
// at step 1e-3). Never returns null.
struct QdbModel *qdb_model_new(void);

// # Safety
// `model` must come from `qdb_model_new` and not be used afterwards. Null is ignored.
void qdb_model_free(struct QdbModel *model);

// # Safety
// `model` must be a live handle.
enum QdbStatus qdb_model_set_time(struct QdbModel *model, double t);

// Uncertain-state weights with and without a categorization step.
//
// # Safety
// `model` must be a live handle.
enum QdbStatus qdb_model_set_weights(struct QdbModel *model,
                                     double categorized,
                                     double decision_alone);

// # Safety
// `model` must be a live handle.
enum QdbStatus qdb_model_set_search(struct QdbModel *model,
                                    double h_min,
                                    double h_max,
                                    double step);

// # Safety
// `model` must be a live handle and `out` writable.
enum QdbStatus qdb_predict(const struct QdbModel *model,
                           double p_g,
                           double p_b,
                           double h_g,
                           double h_b,
                           struct QdbPrediction *out);

// Fits `h_g` and `h_b` to the observed conditionals and predicts both conditions.
//
// # Safety
// `model` must be a live handle and `out` writable.
enum QdbStatus qdb_fit(const struct QdbModel *model,
                       double p_g,
                       double p_b,
                       double observed_attack_given_good,
                       double observed_attack_given_bad,
                       struct QdbFitResult *out);

// Reported attack probability given a category, via the matrix exponential.
//
// # Safety
// `out` must be writable.
enum QdbStatus qdb_conditional(double h, double t, double uncertain_weight, double *out);

// Same quantity as `qdb_conditional` at t = pi/2, from the closed form.
//
// # Safety
// `out` must be writable.
enum QdbStatus qdb_closed_form_conditional(double h, double uncertain_weight, double *out);

// # Safety
// `out` must be writable.
enum QdbStatus qdb_markov_total_probability(double p_g,
                                            double p_attack_given_good,
                                            double p_b,
                                            double p_attack_given_bad,
                                            double *out);

// The twelve published records (six sources, wide and narrow faces).
//
// # Safety
// `out` must be writable.
enum QdbStatus qdb_experiments_embedded(struct QdbExperimentSet **out);

// Loads a CSV or JSON record file. On failure `*out` is set to null.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum QdbStatus qdb_experiments_load(const char *path, struct QdbExperimentSet **out);

// # Safety
// `set` must be a live handle or null (returns 0).
size_t qdb_experiments_len(const struct QdbExperimentSet *set);

// # Safety
// `set` must be a live handle and `out` writable.
enum QdbStatus qdb_experiments_get(const struct QdbExperimentSet *set,
                                   size_t index,
                                   struct QdbExperiment *out);

// Source name of record `index`, owned by `set`; null when out of range.
//
// # Safety
// `set` must be a live handle or null.
const char *qdb_experiments_source_id(const struct QdbExperimentSet *set, size_t index);

// # Safety
// `set` must come from this library and not be used afterwards. Null is ignored.
void qdb_experiments_free(struct QdbExperimentSet *set);

// Pignistic transform of a mass spec such as `"A:0.4 A,W:0.6"`.
// On failure `*out` is set to null.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` writable.
enum QdbStatus qdb_pignistic(const char *spec, struct QdbDistribution **out);

// # Safety
// `dist` must be a live handle or null (returns 0).
size_t qdb_distribution_len(const struct QdbDistribution *dist);

// Label and probability of entry `index`. The label is owned by `dist`.
//
// # Safety
// `dist` must be a live handle; `label` and `probability` must be writable.
enum QdbStatus qdb_distribution_get(const struct QdbDistribution *dist,
                                    size_t index,
                                    const char **label,
                                    double *probability);

// # Safety
// `dist` must come from `qdb_pignistic` and not be used afterwards. Null is ignored.
void qdb_distribution_free(struct QdbDistribution *dist);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDB_H */
