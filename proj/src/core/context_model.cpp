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

#include "genlevel/core/context_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "genlevel/core/error.hpp"
#include "genlevel/core/parallel.hpp"
#include "genlevel/core/random.hpp"
#include "json.hpp"

namespace genlevel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_finite(const Embedding& e, const char* what) {
  for (const double v : e) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
  }
}

struct Forward {
  Prediction prediction;
  std::vector<double> transformed_original;          // a = w0*h + b0
  std::vector<std::vector<double>> differences;      // d_i = g_i - a
};

Forward forward_full(const TransformParams& p, const Embedding& original,
                     std::span<const Embedding> candidates, const std::vector<bool>& mask,
                     int logit_sign) {
  const std::size_t dim = p.dim();
  const std::size_t slots = candidates.size();
  if (logit_sign != 1 && logit_sign != -1) throw InvalidArgument("logit_sign must be +1 or -1");
  if (original.size() != dim) throw InvalidArgument("original embedding dimension mismatch");
  if (mask.size() != slots) throw InvalidArgument("mask length differs from candidate count");
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw InvalidArgument("mask has no real candidate");
  }
  check_finite(original, "original embedding");

  Forward f;
  f.transformed_original.resize(dim);
  for (std::size_t v = 0; v < dim; ++v) f.transformed_original[v] = p.w0[v] * original[v] + p.b0[v];

  auto& pred = f.prediction;
  pred.scores.assign(slots, 0.0);
  pred.masked_logits.assign(slots, kNegInf);
  pred.probabilities.assign(slots, 0.0);
  f.differences.resize(slots);
  const double inv_dim = 1.0 / static_cast<double>(dim);
  double max_logit = kNegInf;
  for (std::size_t i = 0; i < slots; ++i) {
    const Embedding& h = candidates[i];
    if (h.size() != dim) throw InvalidArgument("candidate embedding dimension mismatch");
    check_finite(h, "candidate embedding");
    if (!mask[i]) continue;
    auto& d = f.differences[i];
    d.resize(dim);
    double sum = 0.0;
    for (std::size_t v = 0; v < dim; ++v) {
      d[v] = p.w1[v] * h[v] + p.b1[v] - f.transformed_original[v];
      sum += d[v] * d[v];
    }
    pred.scores[i] = sum * inv_dim;
    if (!std::isfinite(pred.scores[i])) {
      throw NumericError("non-finite score at level " + std::to_string(i + 1));
    }
    pred.masked_logits[i] = logit_sign * pred.scores[i];
    max_logit = std::max(max_logit, pred.masked_logits[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < slots; ++i) {
    if (!mask[i]) continue;
    pred.probabilities[i] = std::exp(pred.masked_logits[i] - max_logit);
    z += pred.probabilities[i];
  }
  std::size_t best = slots;
  for (std::size_t i = 0; i < slots; ++i) {
    if (!mask[i]) continue;
    pred.probabilities[i] /= z;
    if (best == slots || pred.probabilities[i] > pred.probabilities[best]) best = i;
  }
  pred.predicted_level = static_cast<int>(best) + 1;
  return f;
}

void validate_params(const TransformParams& p) {
  const std::size_t dim = p.w0.size();
  if (dim == 0 || p.b0.size() != dim || p.w1.size() != dim || p.b1.size() != dim) {
    throw InvalidArgument("transform parameter shapes disagree");
  }
}

std::string format_real(double x) {
  if (!std::isfinite(x)) throw NumericError("cannot serialize non-finite parameter");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double epoch_loss(const TransformParams& params, std::span<const EncodedExample> examples,
                  int logit_sign) {
  if (examples.empty()) return 0.0;
  return loss_and_grad(params, examples, logit_sign).loss;
}

struct EpochRunner {
  std::span<const EncodedExample> examples;
  const ContextModelConfig& config;
  TransformParams params;
  AdamW optimizer;
  Rng shuffle_rng;
  std::vector<std::size_t> order;

  EpochRunner(std::span<const EncodedExample> ex, std::size_t dim, const ContextModelConfig& cfg,
              std::uint64_t shuffle_seed)
      : examples(ex),
        config(cfg),
        params(TransformParams::identity(dim)),
        optimizer(dim, cfg.learning_rate, cfg.weight_decay, cfg.adam_beta1, cfg.adam_beta2,
                  cfg.adam_eps),
        shuffle_rng(shuffle_seed),
        order(ex.size()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  // One pass in shuffled mini-batches; returns the mean batch loss.
  double run_epoch() {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    std::size_t batches = 0;
    std::vector<EncodedExample> batch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(examples[order[k]]);
      const auto lg = loss_and_grad(params, batch, config.logit_sign);
      optimizer.step(params, lg.grad);
      total += lg.loss;
      ++batches;
    }
    return batches == 0 ? 0.0 : total / static_cast<double>(batches);
  }
};

TrainResult train_without_validation(std::span<const EncodedExample> examples, std::size_t dim,
                                     const ContextModelConfig& config, int epochs) {
  EpochRunner runner(examples, dim, config, sub_seed(config.seed, "shuffle"));
  TrainResult result;
  result.log.train_size = examples.size();
  for (int e = 1; e <= epochs; ++e) {
    EpochLog entry;
    entry.epoch = e;
    entry.train_loss = runner.run_epoch();
    result.log.epochs.push_back(entry);
  }
  result.log.best_epoch = epochs;
  result.params = std::move(runner.params);
  return result;
}

TrainResult train_holdout(std::span<const EncodedExample> examples, std::size_t dim,
                          const ContextModelConfig& config) {
  std::vector<std::size_t> idx(examples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng split_rng(sub_seed(config.seed, "holdout"));
  split_rng.shuffle(std::span<std::size_t>(idx));
  auto n_val = static_cast<std::size_t>(
      std::llround(config.holdout_fraction * static_cast<double>(examples.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, examples.size() - 1);
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::vector<EncodedExample> val, train;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (k < n_val ? val : train).push_back(examples[idx[k]]);
  }

  EpochRunner runner(train, dim, config, sub_seed(config.seed, "shuffle"));
  TrainResult result;
  result.log.train_size = train.size();
  result.log.validation_size = val.size();
  result.params = runner.params;
  double best_acc = majority_vote_accuracy(runner.params, val, config.logit_sign);
  result.log.epochs.push_back({0, epoch_loss(runner.params, train, config.logit_sign), best_acc});
  int since_best = 0;
  for (int e = 1; e <= config.max_epochs; ++e) {
    EpochLog entry;
    entry.epoch = e;
    entry.train_loss = runner.run_epoch();
    entry.validation_accuracy = majority_vote_accuracy(runner.params, val, config.logit_sign);
    result.log.epochs.push_back(entry);
    if (entry.validation_accuracy > best_acc) {
      best_acc = entry.validation_accuracy;
      result.params = runner.params;
      result.log.best_epoch = e;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      result.log.stopped_early = e < config.max_epochs;
      break;
    }
  }
  return result;
}

TrainResult train_leave_one_out(std::span<const EncodedExample> examples, std::size_t dim,
                                const ContextModelConfig& config) {
  const std::size_t n = examples.size();
  const auto epochs = static_cast<std::size_t>(config.max_epochs);
  // correct[e] = number of held-out records predicted correctly after e epochs.
  std::vector<std::vector<int>> per_fold(n, std::vector<int>(epochs + 1, 0));
  parallel_for(n, [&](std::size_t k) {
    std::vector<EncodedExample> train;
    train.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k) train.push_back(examples[i]);
    }
    EpochRunner runner(train, dim, config, sub_seed(config.seed, "loo-shuffle", k));
    const std::span<const EncodedExample> held(&examples[k], 1);
    per_fold[k][0] = majority_vote_accuracy(runner.params, held, config.logit_sign) == 1.0;
    for (std::size_t e = 1; e <= epochs; ++e) {
      runner.run_epoch();
      per_fold[k][e] = majority_vote_accuracy(runner.params, held, config.logit_sign) == 1.0;
    }
  });
  std::vector<double> acc(epochs + 1, 0.0);
  for (std::size_t e = 0; e <= epochs; ++e) {
    int correct = 0;
    for (std::size_t k = 0; k < n; ++k) correct += per_fold[k][e];
    acc[e] = static_cast<double>(correct) / static_cast<double>(n);
  }
  // Patience applies to the averaged curve the same way it does for holdout.
  std::size_t best = 0;
  int since_best = 0;
  for (std::size_t e = 1; e <= epochs; ++e) {
    if (acc[e] > acc[best]) {
      best = e;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      break;
    }
  }
  TrainResult result =
      train_without_validation(examples, dim, config, static_cast<int>(best));
  for (auto& entry : result.log.epochs) entry.validation_accuracy = acc[entry.epoch];
  result.log.epochs.insert(result.log.epochs.begin(),
                           EpochLog{0, epoch_loss(TransformParams::identity(dim), examples,
                                                  config.logit_sign),
                                    acc[0]});
  result.log.validation_size = n;
  result.log.best_epoch = static_cast<int>(best);
  result.log.stopped_early = best < epochs;
  return result;
}

const char* validation_name(ValidationMode mode) {
  switch (mode) {
    case ValidationMode::kNone: return "none";
    case ValidationMode::kHoldout: return "holdout";
    case ValidationMode::kLeaveOneOut: return "leave-one-out";
  }
  return "unknown";
}

}  // namespace

TransformParams TransformParams::identity(std::size_t dim) {
  return {std::vector<double>(dim, 1.0), std::vector<double>(dim, 0.0),
          std::vector<double>(dim, 1.0), std::vector<double>(dim, 0.0)};
}

TransformParams TransformParams::zeros(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0),
          std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
}

ContextModelConfig ContextModelConfig::defaults_for(const std::string& provider_kind) {
  ContextModelConfig c;
  if (provider_kind == "hashed") c.learning_rate = 1e-2;
  return c;
}

Prediction forward(const TransformParams& params, const Embedding& original,
                   std::span<const Embedding> candidates, const std::vector<bool>& mask,
                   int logit_sign) {
  validate_params(params);
  return forward_full(params, original, candidates, mask, logit_sign).prediction;
}

LossAndGrad loss_and_grad(const TransformParams& params, std::span<const EncodedExample> batch,
                          int logit_sign) {
  validate_params(params);
  if (batch.empty()) throw InvalidArgument("empty batch");
  const std::size_t dim = params.dim();
  LossAndGrad out;
  out.grad = TransformParams::zeros(dim);
  const double scale = 2.0 / static_cast<double>(dim);
  for (const auto& ex : batch) {
    const auto t = static_cast<std::size_t>(ex.target_level - 1);
    if (ex.target_level < 1 || t >= ex.mask.size() || !ex.mask[t]) {
      throw InvalidArgument("target level " + std::to_string(ex.target_level) +
                            " is a padded or missing slot");
    }
    const Forward f = forward_full(params, ex.original, ex.candidates, ex.mask, logit_sign);
    const auto& probs = f.prediction.probabilities;
    out.loss -= std::log(probs[t]);
    for (std::size_t i = 0; i < ex.candidates.size(); ++i) {
      if (!ex.mask[i]) continue;
      // dL/dd_{i,v} = sign * (p_i - y_i) * 2/V * d_{i,v}
      const double dlogit = probs[i] - (i == t ? 1.0 : 0.0);
      const double coeff = logit_sign * dlogit * scale;
      const auto& d = f.differences[i];
      const auto& h = ex.candidates[i];
      for (std::size_t v = 0; v < dim; ++v) {
        const double gd = coeff * d[v];
        out.grad.w1[v] += gd * h[v];
        out.grad.b1[v] += gd;
        out.grad.w0[v] -= gd * ex.original[v];
        out.grad.b0[v] -= gd;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv_n;
  for (auto* g : {&out.grad.w0, &out.grad.b0, &out.grad.w1, &out.grad.b1}) {
    for (double& x : *g) x *= inv_n;
  }
  return out;
}

AdamW::AdamW(std::size_t dim, double lr, double weight_decay, double beta1, double beta2,
             double eps)
    : lr_(lr),
      weight_decay_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(TransformParams::zeros(dim)),
      v_(TransformParams::zeros(dim)) {}

void AdamW::step(TransformParams& params, const TransformParams& grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] -= lr_ * weight_decay_ * p[k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      p[k] -= lr_ * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps_);
    }
  };
  update(params.w0, grad.w0, m_.w0, v_.w0);
  update(params.b0, grad.b0, m_.b0, v_.b0);
  update(params.w1, grad.w1, m_.w1, v_.w1);
  update(params.b1, grad.b1, m_.b1, v_.b1);
}

EncodedExample encode_example(const ContextualExample& example,
                              const EmbeddingProvider& provider) {
  auto emb = provider.embed_example(example);
  EncodedExample e;
  e.original = std::move(emb.original);
  e.candidates = std::move(emb.candidates);
  e.mask = example.pad_mask;
  e.target_level = example.target_level;
  e.all_levels = example.all_levels;
  return e;
}

std::vector<EncodedExample> encode_records(std::span<const PiiRecord> records,
                                           const EmbeddingProvider& provider,
                                           const ContextModelConfig& config) {
  std::vector<EncodedExample> out(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    out[i] = encode_example(
        build_contextual_example(records[i], config.max_candidates, config.pad_token), provider);
  });
  return out;
}

double majority_vote_accuracy(const TransformParams& params,
                              std::span<const EncodedExample> examples, int logit_sign) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const auto p = forward(params, ex.original, ex.candidates, ex.mask, logit_sign);
    correct += p.predicted_level == ex.target_level ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TrainResult train_encoded(std::span<const EncodedExample> examples, std::size_t dim,
                          const ContextModelConfig& config) {
  if (examples.empty()) throw InvalidArgument("empty training set");
  if (config.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  if (config.max_epochs < 0) throw InvalidArgument("max_epochs must be >= 0");
  TrainResult result;
  ValidationMode mode = config.validation;
  if (mode == ValidationMode::kHoldout && examples.size() < 2) {
    warn("holdout validation needs at least 2 records; training without validation");
    mode = ValidationMode::kNone;
  }
  switch (mode) {
    case ValidationMode::kNone:
      result = train_without_validation(examples, dim, config, config.max_epochs);
      break;
    case ValidationMode::kHoldout:
      result = train_holdout(examples, dim, config);
      break;
    case ValidationMode::kLeaveOneOut:
      result = train_leave_one_out(examples, dim, config);
      break;
  }
  result.log.validation = validation_name(mode);
  return result;
}

TrainResult train_context_model(std::span<const PiiRecord> records,
                                const EmbeddingProvider& provider,
                                const ContextModelConfig& config) {
  if (records.empty()) throw InvalidArgument("empty training set");
  const auto encoded = encode_records(records, provider, config);
  return train_encoded(encoded, provider.dim(), config);
}

Prediction predict_context(const TransformParams& params, const PiiRecord& record,
                           const EmbeddingProvider& provider, const ContextModelConfig& config) {
  const auto ex = encode_example(
      build_contextual_example(record, config.max_candidates, config.pad_token), provider);
  return forward(params, ex.original, ex.candidates, ex.mask, config.logit_sign);
}

std::string training_log_to_json(const TrainingLog& log) {
  nlohmann::json j = nlohmann::json::object();
  j["validation"] = log.validation;
  j["train_size"] = log.train_size;
  j["validation_size"] = log.validation_size;
  j["best_epoch"] = log.best_epoch;
  j["stopped_early"] = log.stopped_early;
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : log.epochs) {
    nlohmann::json row = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
    row["validation_accuracy"] =
        e.validation_accuracy < 0 ? nlohmann::json(nullptr) : nlohmann::json(e.validation_accuracy);
    epochs.push_back(row);
  }
  j["epochs"] = epochs;
  return j.dump(2);
}

std::string checkpoint_to_json(const TransformParams& params, int max_candidates, int logit_sign) {
  validate_params(params);
  std::ostringstream out;
  auto array = [&](const char* name, const std::vector<double>& xs) {
    out << "  \"" << name << "\": [";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << format_real(xs[i]);
    out << "]";
  };
  out << "{\n  \"version\": 1,\n  \"V\": " << params.dim() << ",\n  \"C\": " << max_candidates
      << ",\n  \"logit_sign\": " << logit_sign << ",\n";
  array("W0", params.w0);
  out << ",\n";
  array("b0", params.b0);
  out << ",\n";
  array("W1", params.w1);
  out << ",\n";
  array("b1", params.b1);
  out << "\n}\n";
  return out.str();
}

Checkpoint checkpoint_from_json(std::string_view json_text) {
  Checkpoint c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported checkpoint version");
    const auto dim = j.at("V").get<std::size_t>();
    c.max_candidates = j.at("C").get<int>();
    c.logit_sign = j.at("logit_sign").get<int>();
    c.params.w0 = j.at("W0").get<std::vector<double>>();
    c.params.b0 = j.at("b0").get<std::vector<double>>();
    c.params.w1 = j.at("W1").get<std::vector<double>>();
    c.params.b1 = j.at("b1").get<std::vector<double>>();
    if (c.params.dim() != dim) throw ParseError("checkpoint V does not match W0 length");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint: ") + e.what());
  }
  validate_params(c.params);
  if (c.logit_sign != 1 && c.logit_sign != -1) throw ParseError("bad checkpoint logit_sign");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const TransformParams& params,
                     int max_candidates, int logit_sign) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out << checkpoint_to_json(params, max_candidates, logit_sign);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace genlevel
