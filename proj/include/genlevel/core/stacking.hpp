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

#ifndef GENLEVEL_CORE_STACKING_HPP_
#define GENLEVEL_CORE_STACKING_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genlevel/core/trees.hpp"

namespace genlevel {

struct LogisticParams {
  int iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

// Multinomial logistic regression on dense inputs, fitted by full-batch
// gradient descent from zero weights.
class LogisticRegression {
 public:
  static LogisticRegression fit(std::span<const std::vector<double>> x, std::span<const int> y,
                                int num_classes, const LogisticParams& params);

  std::vector<double> predict_proba(std::span<const double> x) const;
  int num_classes() const { return static_cast<int>(bias_.size()); }

  nlohmann::json to_json() const;
  static LogisticRegression from_json(const nlohmann::json& j);

 private:
  std::vector<std::vector<double>> weights_;  // [class][feature]
  std::vector<double> bias_;
};

enum class Layer1Kind { kTree, kForest, kBoosted };

struct Layer1Spec {
  std::string name;
  Layer1Kind kind = Layer1Kind::kForest;
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;
};

std::unique_ptr<Classifier> fit_layer1(const Layer1Spec& spec, const TrainingSet& data,
                                       std::uint64_t seed);

struct StackingConfig {
  std::vector<Layer1Spec> layer1;
  LogisticParams meta;
  int folds = 5;
  std::uint64_t seed = 0;

  // Gini forest, entropy forest, boosted trees and an entropy tree.
  static StackingConfig defaults();
};

class StackingModel final : public Classifier {
 public:
  StackingModel(std::vector<std::unique_ptr<Classifier>> layer1, LogisticRegression meta,
                int num_classes);

  int num_classes() const override { return num_classes_; }
  std::vector<double> meta_features(const SparseRow& row) const;
  std::vector<double> predict_proba(const SparseRow& row) const override;
  std::size_t layer1_size() const { return layer1_.size(); }

  nlohmann::json to_json() const override;
  static std::unique_ptr<StackingModel> from_json(const nlohmann::json& j);

 private:
  std::vector<std::unique_ptr<Classifier>> layer1_;
  LogisticRegression meta_;
  int num_classes_;
};

struct StackingFit {
  std::unique_ptr<StackingModel> model;
  // Out-of-fold layer-1 distributions, concatenated per training row; these
  // are what the meta-classifier was trained on.
  std::vector<std::vector<double>> oof_meta_features;
  std::vector<int> folds;
};

// Per-class seeded shuffle, then round-robin fold assignment.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

// Retries fold assignment with fresh seeds when a fold's training part
// misses a class, then throws ValidationError.
StackingFit train_stacking(const TrainingSet& data, const StackingConfig& config);
StackingFit train_stacking(const TrainingSet& data, const StackingConfig& config,
                           std::vector<int> folds);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_STACKING_HPP_
