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

#ifndef GENLEVEL_CORE_TREES_HPP_
#define GENLEVEL_CORE_TREES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genlevel/core/features.hpp"
#include "json.hpp"

namespace genlevel {

// Probabilistic classifier over classes 0..num_classes()-1.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int num_classes() const = 0;
  virtual std::vector<double> predict_proba(const SparseRow& row) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

enum class Criterion { kGini, kEntropy, kSquaredError };

Criterion criterion_from_string(const std::string& name);
std::string to_string(Criterion c);

// Impurity of a (weighted) class histogram. Entropy is in bits.
double gini_impurity(std::span<const double> class_weights);
double entropy_impurity(std::span<const double> class_weights);

struct TreeParams {
  Criterion criterion = Criterion::kGini;
  int max_depth = 8;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  // Sample ceil(sqrt(k)) of the k features present at a node instead of
  // scanning all of them.
  bool sqrt_features = false;
  std::uint64_t seed = 0;
};

class DecisionTree final : public Classifier {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double impurity_decrease = 0.0;
    std::vector<double> value;  // class distribution, or {prediction} for regression
  };

  // Greedy axis-aligned splits (left: value <= threshold) chosen by maximum
  // impurity decrease; ties go to the lowest feature, then the lowest
  // threshold. `sample_weight` defaults to 1 per row.
  static DecisionTree fit(const TrainingSet& data, const TreeParams& params,
                          std::span<const double> sample_weight = {});

  // Regression tree on `targets` with squared-error splits. Leaf values come
  // from `leaf_value` over the sample indices that reach the leaf.
  using LeafFn = std::function<double(std::span<const std::size_t>)>;
  static DecisionTree fit_regression(std::span<const SparseRow> rows, std::span<const double> targets,
                                     std::size_t num_features, const TreeParams& params,
                                     const LeafFn& leaf_value);

  int num_classes() const override { return num_classes_; }
  std::vector<double> predict_proba(const SparseRow& row) const override;
  double predict_value(const SparseRow& row) const;
  const Node& leaf(const SparseRow& row) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

  nlohmann::json to_json() const override;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  friend class TreeBuilder;

  int num_classes_ = 0;  // 0 for regression trees
  std::vector<Node> nodes_;
};

inline TreeParams sqrt_feature_tree() {
  TreeParams p;
  p.sqrt_features = true;
  return p;
}

struct ForestParams {
  TreeParams tree = sqrt_feature_tree();
  int n_trees = 50;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

class RandomForest final : public Classifier {
 public:
  static RandomForest fit(const TrainingSet& data, const ForestParams& params);

  int num_classes() const override { return num_classes_; }
  std::vector<double> predict_proba(const SparseRow& row) const override;
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }

  nlohmann::json to_json() const override;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  int num_classes_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<std::uint64_t> seeds_;
};

struct BoostParams {
  int n_rounds = 50;
  double learning_rate = 0.1;
  int max_depth = 3;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

// Multinomial gradient boosting: one regression tree per class per round
// fitted to y - p, with a one-step Newton leaf value, starting from the
// log class prior.
class GradientBoosting final : public Classifier {
 public:
  static GradientBoosting fit(const TrainingSet& data, const BoostParams& params);

  int num_classes() const override { return static_cast<int>(init_.size()); }
  std::vector<double> predict_proba(const SparseRow& row) const override;
  std::vector<double> raw_scores(const SparseRow& row) const;

  nlohmann::json to_json() const override;
  static GradientBoosting from_json(const nlohmann::json& j);

 private:
  std::vector<double> init_;
  double learning_rate_ = 0.1;
  std::vector<std::vector<DecisionTree>> rounds_;  // rounds_[r][k]
};

std::vector<double> softmax(std::span<const double> logits);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_TREES_HPP_
