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

#ifndef GENLEVEL_CORE_CONTEXT_MODEL_HPP_
#define GENLEVEL_CORE_CONTEXT_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genlevel/core/contextual.hpp"
#include "genlevel/core/corpus.hpp"
#include "genlevel/core/encoder.hpp"

namespace genlevel {

// Elementwise affine transforms applied to the original sentence (w0, b0)
// and to each generalized sentence (w1, b1).
struct TransformParams {
  std::vector<double> w0, b0, w1, b1;

  static TransformParams identity(std::size_t dim);
  static TransformParams zeros(std::size_t dim);

  std::size_t dim() const { return w0.size(); }
  bool operator==(const TransformParams&) const = default;
};

enum class ValidationMode { kNone, kHoldout, kLeaveOneOut };

struct ContextModelConfig {
  int max_candidates = 7;
  std::size_t batch_size = 2;
  int max_epochs = 20;
  double learning_rate = 1e-6;
  double weight_decay = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int logit_sign = -1;
  int early_stop_patience = 3;
  ValidationMode validation = ValidationMode::kHoldout;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string pad_token = std::string(kDefaultPadToken);

  // Defaults for a provider kind: "store" keeps lr = 1e-6, "hashed" uses 1e-2
  // since nothing upstream of the transforms is being tuned.
  static ContextModelConfig defaults_for(const std::string& provider_kind);
};

// One record after encoding: everything forward() and the trainer consume.
struct EncodedExample {
  Embedding original;
  std::vector<Embedding> candidates;
  std::vector<bool> mask;
  int target_level = 1;
  std::vector<int> all_levels;
};

struct Prediction {
  std::vector<double> scores;         // MSE per slot, 0 on padded slots
  std::vector<double> masked_logits;  // -inf on padded slots
  std::vector<double> probabilities;  // exactly 0 on padded slots
  int predicted_level = 1;
};

// Scores every slot by the mean squared difference between the transformed
// original and the transformed generalized sentence, masks padded slots and
// applies softmax to logit_sign * score. Ties resolve to the lowest level.
Prediction forward(const TransformParams& params, const Embedding& original,
                   std::span<const Embedding> candidates, const std::vector<bool>& mask,
                   int logit_sign);

struct LossAndGrad {
  double loss = 0.0;
  TransformParams grad;
};

// Mean cross-entropy over the batch and its exact gradient with respect to
// all four parameter vectors.
LossAndGrad loss_and_grad(const TransformParams& params, std::span<const EncodedExample> batch,
                          int logit_sign);

// AdamW with decoupled weight decay over the four parameter vectors.
class AdamW {
 public:
  AdamW(std::size_t dim, double lr, double weight_decay, double beta1, double beta2, double eps);

  void step(TransformParams& params, const TransformParams& grad);
  std::uint64_t steps() const { return t_; }

 private:
  double lr_, weight_decay_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  TransformParams m_, v_;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_accuracy = -1.0;  // -1 when no validation split
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::string validation;
};

struct TrainResult {
  TransformParams params;
  TrainingLog log;
};

EncodedExample encode_example(const ContextualExample& example, const EmbeddingProvider& provider);
std::vector<EncodedExample> encode_records(std::span<const PiiRecord> records,
                                           const EmbeddingProvider& provider,
                                           const ContextModelConfig& config);

// Majority-vote accuracy of argmax predictions.
double majority_vote_accuracy(const TransformParams& params,
                              std::span<const EncodedExample> examples, int logit_sign);

TrainResult train_encoded(std::span<const EncodedExample> examples, std::size_t dim,
                          const ContextModelConfig& config);
TrainResult train_context_model(std::span<const PiiRecord> records,
                                const EmbeddingProvider& provider,
                                const ContextModelConfig& config);

Prediction predict_context(const TransformParams& params, const PiiRecord& record,
                           const EmbeddingProvider& provider, const ContextModelConfig& config);

std::string training_log_to_json(const TrainingLog& log);

// Checkpoint JSON with every real written at 17 significant digits.
std::string checkpoint_to_json(const TransformParams& params, int max_candidates, int logit_sign);
struct Checkpoint {
  TransformParams params;
  int max_candidates = 0;
  int logit_sign = -1;
};
Checkpoint checkpoint_from_json(std::string_view json_text);
void save_checkpoint(const std::filesystem::path& path, const TransformParams& params,
                     int max_candidates, int logit_sign);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_CONTEXT_MODEL_HPP_
