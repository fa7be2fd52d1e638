/*
 * Copyright 2026 The genlevel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * genlevel C API.
 *
 * Every object is an opaque handle released by its matching *_free
 * function. Functions return a gl_status; on failure, gl_last_error()
 * returns a message for the calling thread until its next API call.
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with gl_string_free().
 *
 * Levels are 1-based throughout.
 */
#ifndef GENLEVEL_GENLEVEL_H_
#define GENLEVEL_GENLEVEL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(GENLEVEL_BUILDING_LIBRARY)
#define GL_API __attribute__((visibility("default")))
#else
#define GL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gl_status {
  GL_OK = 0,
  GL_ERR_INVALID_ARGUMENT = 1,
  GL_ERR_IO = 2,
  GL_ERR_PARSE = 3,
  GL_ERR_VALIDATION = 4,
  GL_ERR_KEY_NOT_FOUND = 5,
  GL_ERR_NUMERIC = 6,
  GL_ERR_STATE = 7,
  GL_ERR_INTERNAL = 99
} gl_status;

GL_API const char* gl_version(void);
GL_API const char* gl_last_error(void);
GL_API const char* gl_status_name(gl_status status);
GL_API void gl_string_free(char* s);

/* Worker threads for parallel stages; 0 = all cores. */
GL_API void gl_set_threads(size_t n);

/* ---- datasets -------------------------------------------------------- */

typedef struct gl_dataset gl_dataset;

typedef enum gl_split { GL_SPLIT_TRAIN = 0, GL_SPLIT_TEST = 1 } gl_split;

GL_API gl_status gl_dataset_load(const char* path, gl_split split, gl_dataset** out);
GL_API void gl_dataset_free(gl_dataset* ds);
GL_API size_t gl_dataset_size(const gl_dataset* ds);
/* Records with at most max_candidates candidates, order preserved. */
GL_API gl_status gl_dataset_filter(const gl_dataset* ds, int max_candidates, gl_dataset** out);
GL_API gl_status gl_dataset_save(const gl_dataset* ds, const char* path);
GL_API gl_status gl_dataset_record_id(const gl_dataset* ds, size_t index, const char** out);
GL_API gl_status gl_dataset_num_candidates(const gl_dataset* ds, size_t index, int* out);
GL_API gl_status gl_dataset_candidate(const gl_dataset* ds, size_t index, int level,
                                      const char** out);
/* Histograms and coverage for each C in c_values, as JSON. */
GL_API gl_status gl_dataset_stats_json(const gl_dataset* ds, const int* c_values,
                                       size_t n_values, char** out_json);
/* One padded contextual example per record, as JSON Lines. */
GL_API gl_status gl_dataset_contextual_jsonl(const gl_dataset* ds, int max_candidates,
                                             const char* pad_token, char** out_jsonl);
/* Record text with the span replaced by the candidate at `level`. */
GL_API gl_status gl_generalize_text(const gl_dataset* ds, size_t index, int level,
                                    char** out_text);

/* ---- embedding providers --------------------------------------------- */

typedef struct gl_provider gl_provider;

GL_API gl_status gl_provider_hashed(size_t dim, size_t ngram_n, gl_provider** out);
/* Loads a PIEM embedding store. */
GL_API gl_status gl_provider_store(const char* path, gl_provider** out);
GL_API void gl_provider_free(gl_provider* p);
GL_API size_t gl_provider_dim(const gl_provider* p);
/* "hashed" or "store"; static storage. */
GL_API const char* gl_provider_kind(const gl_provider* p);

/* ---- context-aware model --------------------------------------------- */

typedef enum gl_validation {
  GL_VALIDATION_NONE = 0,
  GL_VALIDATION_HOLDOUT = 1,
  GL_VALIDATION_LEAVE_ONE_OUT = 2
} gl_validation;

typedef struct gl_context_config {
  int max_candidates;
  size_t batch_size;
  int max_epochs;
  double learning_rate;
  double weight_decay;
  int logit_sign;
  int early_stop_patience;
  gl_validation validation;
  double holdout_fraction;
  uint64_t seed;
  const char* pad_token; /* NULL = "[PAD]" */
} gl_context_config;

/* Fills defaults for the provider's kind (lr 1e-2 for hashed, 1e-6 otherwise). */
GL_API void gl_context_config_init(gl_context_config* cfg, const gl_provider* provider);

typedef struct gl_context_model gl_context_model;

/* log_json may be NULL. */
GL_API gl_status gl_context_train(const gl_dataset* train, const gl_provider* provider,
                                  const gl_context_config* cfg, gl_context_model** out,
                                  char** log_json);
/* levels_out must hold gl_dataset_size(ds) ints. details_jsonl (nullable)
 * receives per-record scores and probabilities. */
GL_API gl_status gl_context_predict(const gl_context_model* model, const gl_dataset* ds,
                                    const gl_provider* provider, int* levels_out,
                                    char** details_jsonl);
GL_API gl_status gl_context_save(const gl_context_model* model, const char* path);
GL_API gl_status gl_context_load(const char* path, const char* pad_token,
                                 gl_context_model** out);
GL_API int gl_context_max_candidates(const gl_context_model* model);
GL_API size_t gl_context_dim(const gl_context_model* model);
GL_API void gl_context_free(gl_context_model* model);

/* ---- feature-based model --------------------------------------------- */

typedef enum gl_feature_kind {
  GL_FEATURE_TREE = 0,
  GL_FEATURE_FOREST = 1,
  GL_FEATURE_BOOSTED = 2,
  GL_FEATURE_STACKING = 3
} gl_feature_kind;

typedef enum gl_criterion { GL_CRITERION_GINI = 0, GL_CRITERION_ENTROPY = 1 } gl_criterion;

typedef struct gl_feature_config {
  gl_feature_kind kind;
  gl_criterion criterion;
  int max_depth;
  int n_trees;
  int bootstrap;
  int boost_rounds;
  double boost_learning_rate;
  int boost_depth;
  int folds;
  uint64_t seed;
} gl_feature_config;

GL_API void gl_feature_config_init(gl_feature_config* cfg);

typedef struct gl_feature_model gl_feature_model;

GL_API gl_status gl_feature_train(const gl_dataset* train, const gl_feature_config* cfg,
                                  gl_feature_model** out);
GL_API gl_status gl_feature_predict(const gl_feature_model* model, const gl_dataset* ds,
                                    int* levels_out);
GL_API gl_status gl_feature_save(const gl_feature_model* model, const char* path);
GL_API gl_status gl_feature_load(const char* path, gl_feature_model** out);
GL_API void gl_feature_free(gl_feature_model* model);

/* ---- baselines ------------------------------------------------------- */

typedef enum gl_baseline {
  GL_BASELINE_MOST_FREQUENT_LEVEL = 0,
  GL_BASELINE_FIRST_CANDIDATE = 1
} gl_baseline;

/* Fits on `train` (ignored for first-candidate), predicts `test`. The
 * fitted constant level is written to fitted_level when non-NULL. */
GL_API gl_status gl_baseline_predict(const gl_dataset* train, const gl_dataset* test,
                                     gl_baseline strategy, int* levels_out, int* fitted_level);

/* ---- evaluation ------------------------------------------------------ */

typedef struct gl_eval gl_eval;

typedef enum gl_weighting { GL_WEIGHTING_LITERAL = 0, GL_WEIGHTING_SUPPORT = 1 } gl_weighting;

typedef enum gl_report_format {
  GL_REPORT_JSON = 0,
  GL_REPORT_TEXT = 1,
  GL_REPORT_CONFUSION_COUNTS_CSV = 2,
  GL_REPORT_CONFUSION_NORMALIZED_CSV = 3
} gl_report_format;

/* num_levels = 0 sizes the level range from the data. */
GL_API gl_status gl_evaluate(const gl_dataset* ds, const int* levels, size_t n, int num_levels,
                             gl_eval** out);
GL_API double gl_eval_majority_vote(const gl_eval* ev);
GL_API double gl_eval_all_selections(const gl_eval* ev);
/* out3 receives precision, recall, F1. */
GL_API void gl_eval_weighted(const gl_eval* ev, gl_weighting mode, double* out3);
GL_API gl_status gl_eval_report(const gl_eval* ev, gl_report_format format, char** out);
GL_API void gl_eval_free(gl_eval* ev);

#ifdef __cplusplus
}
#endif

#endif /* GENLEVEL_GENLEVEL_H_ */
