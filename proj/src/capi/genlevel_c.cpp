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

#include "genlevel/genlevel.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "genlevel/core/context_model.hpp"
#include "genlevel/core/contextual.hpp"
#include "genlevel/core/corpus.hpp"
#include "genlevel/core/encoder.hpp"
#include "genlevel/core/error.hpp"
#include "genlevel/core/eval.hpp"
#include "genlevel/core/feature_model.hpp"
#include "genlevel/core/parallel.hpp"
#include "json.hpp"

struct gl_dataset {
  genlevel::Dataset data;
};

struct gl_provider {
  std::shared_ptr<const genlevel::EmbeddingProvider> impl;
};

struct gl_context_model {
  genlevel::TransformParams params;
  genlevel::ContextModelConfig config;
};

struct gl_feature_model {
  genlevel::FeatureModel model;
};

struct gl_eval {
  genlevel::EvalResult result;
};

namespace {

thread_local std::string t_last_error;

gl_status to_status(genlevel::ErrorCode code) {
  switch (code) {
    case genlevel::ErrorCode::kInvalidArgument: return GL_ERR_INVALID_ARGUMENT;
    case genlevel::ErrorCode::kIo: return GL_ERR_IO;
    case genlevel::ErrorCode::kParse: return GL_ERR_PARSE;
    case genlevel::ErrorCode::kValidation: return GL_ERR_VALIDATION;
    case genlevel::ErrorCode::kKeyNotFound: return GL_ERR_KEY_NOT_FOUND;
    case genlevel::ErrorCode::kNumeric: return GL_ERR_NUMERIC;
    case genlevel::ErrorCode::kState: return GL_ERR_STATE;
  }
  return GL_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn>
gl_status guarded(Fn&& fn) {
  t_last_error.clear();
  try {
    fn();
    return GL_OK;
  } catch (const genlevel::Error& e) {
    t_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
  } catch (const std::exception& e) {
    t_last_error = e.what();
  } catch (...) {
    t_last_error = "unknown error";
  }
  return GL_ERR_INTERNAL;
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw genlevel::InvalidArgument(std::string(name) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const genlevel::PiiRecord& record_at(const gl_dataset* ds, size_t index) {
  require(ds, "dataset");
  if (index >= ds->data.records.size()) {
    throw genlevel::InvalidArgument("record index " + std::to_string(index) + " out of range");
  }
  return ds->data.records[index];
}

}  // namespace

extern "C" {

GL_API const char* gl_version(void) { return "0.1.0"; }

GL_API const char* gl_last_error(void) { return t_last_error.c_str(); }

GL_API const char* gl_status_name(gl_status status) {
  switch (status) {
    case GL_OK: return "ok";
    case GL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GL_ERR_IO: return "i/o error";
    case GL_ERR_PARSE: return "parse error";
    case GL_ERR_VALIDATION: return "validation error";
    case GL_ERR_KEY_NOT_FOUND: return "key not found";
    case GL_ERR_NUMERIC: return "numeric error";
    case GL_ERR_STATE: return "state error";
    case GL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

GL_API void gl_string_free(char* s) { std::free(s); }

GL_API void gl_set_threads(size_t n) { genlevel::set_thread_count(n); }

GL_API gl_status gl_dataset_load(const char* path, gl_split split, gl_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_unique<gl_dataset>();
    ds->data = genlevel::load_dataset(
        path, split == GL_SPLIT_TEST ? genlevel::Split::kTest : genlevel::Split::kTrain);
    *out = ds.release();
  });
}

GL_API void gl_dataset_free(gl_dataset* ds) { delete ds; }

GL_API size_t gl_dataset_size(const gl_dataset* ds) {
  return ds == nullptr ? 0 : ds->data.records.size();
}

GL_API gl_status gl_dataset_filter(const gl_dataset* ds, int max_candidates, gl_dataset** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    auto filtered = std::make_unique<gl_dataset>();
    filtered->data.split = ds->data.split;
    filtered->data.types = ds->data.types;
    filtered->data.records = genlevel::filter_by_max_candidates(ds->data.records, max_candidates);
    *out = filtered.release();
  });
}

GL_API gl_status gl_dataset_save(const gl_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    genlevel::save_dataset(path, ds->data.records);
  });
}

GL_API gl_status gl_dataset_record_id(const gl_dataset* ds, size_t index, const char** out) {
  return guarded([&] {
    require(out, "out");
    *out = record_at(ds, index).id.c_str();
  });
}

GL_API gl_status gl_dataset_num_candidates(const gl_dataset* ds, size_t index, int* out) {
  return guarded([&] {
    require(out, "out");
    *out = record_at(ds, index).num_candidates();
  });
}

GL_API gl_status gl_dataset_candidate(const gl_dataset* ds, size_t index, int level,
                                      const char** out) {
  return guarded([&] {
    require(out, "out");
    const auto& r = record_at(ds, index);
    if (level < 1 || level > r.num_candidates()) {
      throw genlevel::InvalidArgument("level " + std::to_string(level) + " out of range");
    }
    *out = r.candidates[static_cast<std::size_t>(level - 1)].c_str();
  });
}

GL_API gl_status gl_dataset_stats_json(const gl_dataset* ds, const int* c_values,
                                       size_t n_values, char** out_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_json, "out_json");
    if (n_values > 0) require(c_values, "c_values");
    const std::vector<int> cs(c_values, c_values + n_values);
    *out_json = dup_string(genlevel::stats_to_json(genlevel::compute_stats(ds->data.records, cs)));
  });
}

GL_API gl_status gl_dataset_contextual_jsonl(const gl_dataset* ds, int max_candidates,
                                             const char* pad_token, char** out_jsonl) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_jsonl, "out_jsonl");
    const std::string pad = pad_token != nullptr ? pad_token : std::string(genlevel::kDefaultPadToken);
    std::string out;
    for (const auto& r : ds->data.records) {
      out += genlevel::contextual_to_json(genlevel::build_contextual_example(r, max_candidates, pad));
      out += '\n';
    }
    *out_jsonl = dup_string(out);
  });
}

GL_API gl_status gl_generalize_text(const gl_dataset* ds, size_t index, int level,
                                    char** out_text) {
  return guarded([&] {
    require(out_text, "out_text");
    *out_text = dup_string(genlevel::generalize_text(record_at(ds, index), level));
  });
}

GL_API gl_status gl_provider_hashed(size_t dim, size_t ngram_n, gl_provider** out) {
  return guarded([&] {
    require(out, "out");
    auto p = std::make_unique<gl_provider>();
    p->impl = std::make_shared<genlevel::HashedEmbedder>(dim, ngram_n);
    *out = p.release();
  });
}

GL_API gl_status gl_provider_store(const char* path, gl_provider** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto store = std::make_shared<const genlevel::EmbeddingStore>(genlevel::EmbeddingStore::read(path));
    auto p = std::make_unique<gl_provider>();
    p->impl = std::make_shared<genlevel::StoreProvider>(std::move(store));
    *out = p.release();
  });
}

GL_API void gl_provider_free(gl_provider* p) { delete p; }

GL_API size_t gl_provider_dim(const gl_provider* p) { return p == nullptr ? 0 : p->impl->dim(); }

GL_API const char* gl_provider_kind(const gl_provider* p) {
  if (p == nullptr) return "";
  return p->impl->kind() == "hashed" ? "hashed" : "store";
}

GL_API void gl_context_config_init(gl_context_config* cfg, const gl_provider* provider) {
  if (cfg == nullptr) return;
  const auto d = genlevel::ContextModelConfig::defaults_for(
      provider != nullptr ? provider->impl->kind() : std::string("store"));
  cfg->max_candidates = d.max_candidates;
  cfg->batch_size = d.batch_size;
  cfg->max_epochs = d.max_epochs;
  cfg->learning_rate = d.learning_rate;
  cfg->weight_decay = d.weight_decay;
  cfg->logit_sign = d.logit_sign;
  cfg->early_stop_patience = d.early_stop_patience;
  cfg->validation = GL_VALIDATION_HOLDOUT;
  cfg->holdout_fraction = d.holdout_fraction;
  cfg->seed = d.seed;
  cfg->pad_token = nullptr;
}

namespace {

genlevel::ContextModelConfig to_core(const gl_context_config& c) {
  genlevel::ContextModelConfig k;
  k.max_candidates = c.max_candidates;
  k.batch_size = c.batch_size;
  k.max_epochs = c.max_epochs;
  k.learning_rate = c.learning_rate;
  k.weight_decay = c.weight_decay;
  k.logit_sign = c.logit_sign;
  k.early_stop_patience = c.early_stop_patience;
  switch (c.validation) {
    case GL_VALIDATION_NONE: k.validation = genlevel::ValidationMode::kNone; break;
    case GL_VALIDATION_HOLDOUT: k.validation = genlevel::ValidationMode::kHoldout; break;
    case GL_VALIDATION_LEAVE_ONE_OUT: k.validation = genlevel::ValidationMode::kLeaveOneOut; break;
    default: throw genlevel::InvalidArgument("unknown validation mode");
  }
  k.holdout_fraction = c.holdout_fraction;
  k.seed = c.seed;
  if (c.pad_token != nullptr) k.pad_token = c.pad_token;
  if (k.logit_sign != 1 && k.logit_sign != -1) {
    throw genlevel::InvalidArgument("logit_sign must be +1 or -1");
  }
  return k;
}

}  // namespace

GL_API gl_status gl_context_train(const gl_dataset* train, const gl_provider* provider,
                                  const gl_context_config* cfg, gl_context_model** out,
                                  char** log_json) {
  return guarded([&] {
    require(train, "train dataset");
    require(provider, "provider");
    require(cfg, "config");
    require(out, "out");
    auto model = std::make_unique<gl_context_model>();
    model->config = to_core(*cfg);
    auto result = genlevel::train_context_model(train->data.records, *provider->impl, model->config);
    model->params = std::move(result.params);
    if (log_json != nullptr) *log_json = dup_string(genlevel::training_log_to_json(result.log));
    *out = model.release();
  });
}

GL_API gl_status gl_context_predict(const gl_context_model* model, const gl_dataset* ds,
                                    const gl_provider* provider, int* levels_out,
                                    char** details_jsonl) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(provider, "provider");
    require(levels_out, "levels_out");
    if (provider->impl->dim() != model->params.dim()) {
      throw genlevel::InvalidArgument("provider dimension " + std::to_string(provider->impl->dim()) +
                                      " differs from model dimension " +
                                      std::to_string(model->params.dim()));
    }
    const auto& records = ds->data.records;
    std::vector<genlevel::Prediction> preds(records.size());
    genlevel::parallel_for(records.size(), [&](std::size_t i) {
      preds[i] = genlevel::predict_context(model->params, records[i], *provider->impl, model->config);
    });
    std::string details;
    for (std::size_t i = 0; i < records.size(); ++i) {
      levels_out[i] = preds[i].predicted_level;
      if (details_jsonl != nullptr) {
        nlohmann::json row = {{"id", records[i].id},
                              {"predicted_level", preds[i].predicted_level},
                              {"scores", preds[i].scores},
                              {"probabilities", preds[i].probabilities}};
        details += row.dump();
        details += '\n';
      }
    }
    if (details_jsonl != nullptr) *details_jsonl = dup_string(details);
  });
}

GL_API gl_status gl_context_save(const gl_context_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    genlevel::save_checkpoint(path, model->params, model->config.max_candidates,
                              model->config.logit_sign);
  });
}

GL_API gl_status gl_context_load(const char* path, const char* pad_token,
                                 gl_context_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ckpt = genlevel::load_checkpoint(path);
    auto model = std::make_unique<gl_context_model>();
    model->params = std::move(ckpt.params);
    model->config.max_candidates = ckpt.max_candidates;
    model->config.logit_sign = ckpt.logit_sign;
    if (pad_token != nullptr) model->config.pad_token = pad_token;
    *out = model.release();
  });
}

GL_API int gl_context_max_candidates(const gl_context_model* model) {
  return model == nullptr ? 0 : model->config.max_candidates;
}

GL_API size_t gl_context_dim(const gl_context_model* model) {
  return model == nullptr ? 0 : model->params.dim();
}

GL_API void gl_context_free(gl_context_model* model) { delete model; }

GL_API void gl_feature_config_init(gl_feature_config* cfg) {
  if (cfg == nullptr) return;
  const genlevel::FeatureModelConfig d;
  cfg->kind = GL_FEATURE_STACKING;
  cfg->criterion = GL_CRITERION_GINI;
  cfg->max_depth = d.max_depth;
  cfg->n_trees = d.n_trees;
  cfg->bootstrap = d.bootstrap ? 1 : 0;
  cfg->boost_rounds = d.boost_rounds;
  cfg->boost_learning_rate = d.boost_learning_rate;
  cfg->boost_depth = d.boost_depth;
  cfg->folds = d.folds;
  cfg->seed = d.seed;
}

GL_API gl_status gl_feature_train(const gl_dataset* train, const gl_feature_config* cfg,
                                  gl_feature_model** out) {
  return guarded([&] {
    require(train, "train dataset");
    require(cfg, "config");
    require(out, "out");
    genlevel::FeatureModelConfig c;
    switch (cfg->kind) {
      case GL_FEATURE_TREE: c.kind = genlevel::FeatureModelKind::kTree; break;
      case GL_FEATURE_FOREST: c.kind = genlevel::FeatureModelKind::kForest; break;
      case GL_FEATURE_BOOSTED: c.kind = genlevel::FeatureModelKind::kBoosted; break;
      case GL_FEATURE_STACKING: c.kind = genlevel::FeatureModelKind::kStacking; break;
      default: throw genlevel::InvalidArgument("unknown feature model kind");
    }
    c.criterion = cfg->criterion == GL_CRITERION_ENTROPY ? genlevel::Criterion::kEntropy
                                                          : genlevel::Criterion::kGini;
    c.max_depth = cfg->max_depth;
    c.n_trees = cfg->n_trees;
    c.bootstrap = cfg->bootstrap != 0;
    c.boost_rounds = cfg->boost_rounds;
    c.boost_learning_rate = cfg->boost_learning_rate;
    c.boost_depth = cfg->boost_depth;
    c.folds = cfg->folds;
    c.seed = cfg->seed;
    auto model = std::make_unique<gl_feature_model>(
        gl_feature_model{genlevel::FeatureModel::train(train->data.records, c)});
    *out = model.release();
  });
}

GL_API gl_status gl_feature_predict(const gl_feature_model* model, const gl_dataset* ds,
                                    int* levels_out) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(levels_out, "levels_out");
    const auto& records = ds->data.records;
    genlevel::parallel_for(records.size(), [&](std::size_t i) {
      levels_out[i] = model->model.predict_level(records[i]);
    });
  });
}

GL_API gl_status gl_feature_save(const gl_feature_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    model->model.save(path);
  });
}

GL_API gl_status gl_feature_load(const char* path, gl_feature_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto model = std::make_unique<gl_feature_model>(gl_feature_model{genlevel::FeatureModel::load(path)});
    *out = model.release();
  });
}

GL_API void gl_feature_free(gl_feature_model* model) { delete model; }

GL_API gl_status gl_baseline_predict(const gl_dataset* train, const gl_dataset* test,
                                     gl_baseline strategy, int* levels_out, int* fitted_level) {
  return guarded([&] {
    require(test, "test dataset");
    require(levels_out, "levels_out");
    const auto s = strategy == GL_BASELINE_FIRST_CANDIDATE
                       ? genlevel::BaselineStrategy::kFirstCandidate
                       : genlevel::BaselineStrategy::kMostFrequentLevel;
    if (s == genlevel::BaselineStrategy::kMostFrequentLevel) require(train, "train dataset");
    const auto baseline = genlevel::Baseline::fit(
        train != nullptr ? std::span<const genlevel::PiiRecord>(train->data.records)
                         : std::span<const genlevel::PiiRecord>(),
        s);
    const auto levels = genlevel::baseline_predict(test->data.records, baseline);
    std::copy(levels.begin(), levels.end(), levels_out);
    if (fitted_level != nullptr) *fitted_level = baseline.constant_level();
  });
}

GL_API gl_status gl_evaluate(const gl_dataset* ds, const int* levels, size_t n, int num_levels,
                             gl_eval** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    if (n > 0) require(levels, "levels");
    auto ev = std::make_unique<gl_eval>();
    ev->result = genlevel::evaluate(std::span<const int>(levels, n), ds->data.records, num_levels);
    *out = ev.release();
  });
}

GL_API double gl_eval_majority_vote(const gl_eval* ev) {
  return ev == nullptr ? 0.0 : ev->result.majority_vote_acc;
}

GL_API double gl_eval_all_selections(const gl_eval* ev) {
  return ev == nullptr ? 0.0 : ev->result.all_selections_acc;
}

GL_API void gl_eval_weighted(const gl_eval* ev, gl_weighting mode, double* out3) {
  if (ev == nullptr || out3 == nullptr) return;
  const auto& w = mode == GL_WEIGHTING_LITERAL ? ev->result.weighted_literal
                                               : ev->result.weighted_support;
  out3[0] = w.precision;
  out3[1] = w.recall;
  out3[2] = w.f1;
}

GL_API gl_status gl_eval_report(const gl_eval* ev, gl_report_format format, char** out) {
  return guarded([&] {
    require(ev, "eval");
    require(out, "out");
    switch (format) {
      case GL_REPORT_JSON: *out = dup_string(genlevel::eval_to_json(ev->result)); break;
      case GL_REPORT_TEXT: *out = dup_string(genlevel::eval_to_text(ev->result)); break;
      case GL_REPORT_CONFUSION_COUNTS_CSV:
        *out = dup_string(genlevel::confusion_counts_csv(ev->result.confusion));
        break;
      case GL_REPORT_CONFUSION_NORMALIZED_CSV:
        *out = dup_string(genlevel::confusion_normalized_csv(ev->result.confusion));
        break;
      default: throw genlevel::InvalidArgument("unknown report format");
    }
  });
}

GL_API void gl_eval_free(gl_eval* ev) { delete ev; }

}  // extern "C"
