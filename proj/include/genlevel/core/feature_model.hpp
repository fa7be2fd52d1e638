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

#ifndef GENLEVEL_CORE_FEATURE_MODEL_HPP_
#define GENLEVEL_CORE_FEATURE_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genlevel/core/corpus.hpp"
#include "genlevel/core/features.hpp"
#include "genlevel/core/stacking.hpp"
#include "genlevel/core/trees.hpp"

namespace genlevel {

enum class FeatureModelKind { kTree, kForest, kBoosted, kStacking };

FeatureModelKind feature_model_kind_from_string(const std::string& name);
std::string to_string(FeatureModelKind kind);

struct FeatureModelConfig {
  FeatureModelKind kind = FeatureModelKind::kStacking;
  Criterion criterion = Criterion::kGini;
  int max_depth = 8;
  int n_trees = 50;
  bool bootstrap = true;
  int boost_rounds = 50;
  double boost_learning_rate = 0.1;
  int boost_depth = 3;
  int folds = 5;
  std::uint64_t seed = 0;
};

// Labels are majority_level - 1; the class space is levels 1..max #gen of
// the training records.
TrainingSet build_training_set(std::span<const PiiRecord> records, const Vocabulary& vocab,
                               const SemanticTypeRegistry& types);

// Zeroes levels above `num_candidates`, renormalizes, and returns the
// argmax level (1-based, ties to the lowest). All-zero mass picks level 1.
std::vector<double> restrict_to_candidates(std::span<const double> distribution,
                                           int num_candidates);
int argmax_level(std::span<const double> distribution, int num_candidates);

// Vocabulary, type codes and a trained classifier, saved as one JSON file.
class FeatureModel {
 public:
  static FeatureModel train(std::span<const PiiRecord> records, const FeatureModelConfig& config);

  std::vector<double> predict_distribution(const PiiRecord& record) const;
  int predict_level(const PiiRecord& record) const;

  FeatureModelKind kind() const { return kind_; }
  int num_classes() const { return classifier_->num_classes(); }
  const Vocabulary& vocabulary() const { return vocab_; }
  const SemanticTypeRegistry& types() const { return types_; }
  const Classifier& classifier() const { return *classifier_; }

  nlohmann::json to_json() const;
  static FeatureModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static FeatureModel load(const std::filesystem::path& path);

 private:
  FeatureModelKind kind_ = FeatureModelKind::kStacking;
  Vocabulary vocab_;
  SemanticTypeRegistry types_;
  std::shared_ptr<const Classifier> classifier_;
};

enum class BaselineStrategy { kMostFrequentLevel, kFirstCandidate };

BaselineStrategy baseline_strategy_from_string(const std::string& name);

class Baseline {
 public:
  // most_frequent_level learns the modal majority level (ties to the
  // lowest); first_candidate always answers 1.
  static Baseline fit(std::span<const PiiRecord> train, BaselineStrategy strategy);

  int constant_level() const { return level_; }
  // The constant, clipped to the record's candidate count.
  int predict(const PiiRecord& record) const;

 private:
  int level_ = 1;
};

std::vector<int> baseline_predict(std::span<const PiiRecord> records, const Baseline& baseline);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_FEATURE_MODEL_HPP_
