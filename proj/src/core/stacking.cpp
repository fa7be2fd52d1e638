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

#include "genlevel/core/stacking.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "genlevel/core/error.hpp"
#include "genlevel/core/random.hpp"

namespace genlevel {

using nlohmann::json;

LogisticRegression LogisticRegression::fit(std::span<const std::vector<double>> x,
                                           std::span<const int> y, int num_classes,
                                           const LogisticParams& params) {
  if (x.empty() || x.size() != y.size()) throw InvalidArgument("logistic regression: bad shapes");
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  const auto k_classes = static_cast<std::size_t>(num_classes);
  LogisticRegression lr;
  lr.weights_.assign(k_classes, std::vector<double>(d, 0.0));
  lr.bias_.assign(k_classes, 0.0);
  std::vector<std::vector<double>> gw(k_classes, std::vector<double>(d));
  std::vector<double> gb(k_classes);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int it = 0; it < params.iterations; ++it) {
    for (auto& row : gw) std::fill(row.begin(), row.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = lr.predict_proba(x[i]);
      for (std::size_t k = 0; k < k_classes; ++k) {
        const double r = p[k] - (y[i] == static_cast<int>(k) ? 1.0 : 0.0);
        gb[k] += r;
        for (std::size_t j = 0; j < d; ++j) gw[k][j] += r * x[i][j];
      }
    }
    for (std::size_t k = 0; k < k_classes; ++k) {
      lr.bias_[k] -= params.learning_rate * gb[k] * inv_n;
      for (std::size_t j = 0; j < d; ++j) {
        lr.weights_[k][j] -=
            params.learning_rate * (gw[k][j] * inv_n + params.l2 * lr.weights_[k][j]);
      }
    }
  }
  return lr;
}

std::vector<double> LogisticRegression::predict_proba(std::span<const double> x) const {
  std::vector<double> z(bias_);
  for (std::size_t k = 0; k < z.size(); ++k) {
    for (std::size_t j = 0; j < x.size(); ++j) z[k] += weights_[k][j] * x[j];
  }
  return softmax(z);
}

json LogisticRegression::to_json() const {
  return json{{"type", "logistic"}, {"weights", weights_}, {"bias", bias_}};
}

LogisticRegression LogisticRegression::from_json(const json& j) {
  LogisticRegression lr;
  lr.weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
  lr.bias_ = j.at("bias").get<std::vector<double>>();
  return lr;
}

std::unique_ptr<Classifier> fit_layer1(const Layer1Spec& spec, const TrainingSet& data,
                                       std::uint64_t seed) {
  switch (spec.kind) {
    case Layer1Kind::kTree: {
      TreeParams p = spec.tree;
      p.seed = seed;
      return std::make_unique<DecisionTree>(DecisionTree::fit(data, p));
    }
    case Layer1Kind::kForest: {
      ForestParams p = spec.forest;
      p.seed = seed;
      return std::make_unique<RandomForest>(RandomForest::fit(data, p));
    }
    case Layer1Kind::kBoosted: {
      BoostParams p = spec.boost;
      p.seed = seed;
      return std::make_unique<GradientBoosting>(GradientBoosting::fit(data, p));
    }
  }
  throw InvalidArgument("unknown layer-1 model kind");
}

StackingConfig StackingConfig::defaults() {
  auto spec = [](std::string name, Layer1Kind kind) {
    Layer1Spec s;
    s.name = std::move(name);
    s.kind = kind;
    return s;
  };
  StackingConfig c;
  Layer1Spec gini_forest = spec("forest_gini", Layer1Kind::kForest);
  gini_forest.forest.tree.criterion = Criterion::kGini;
  Layer1Spec entropy_forest = spec("forest_entropy", Layer1Kind::kForest);
  entropy_forest.forest.tree.criterion = Criterion::kEntropy;
  Layer1Spec boosted = spec("boosted", Layer1Kind::kBoosted);
  Layer1Spec tree = spec("tree_entropy", Layer1Kind::kTree);
  tree.tree.criterion = Criterion::kEntropy;
  tree.tree.max_depth = 6;
  c.layer1 = {gini_forest, entropy_forest, boosted, tree};
  return c;
}

StackingModel::StackingModel(std::vector<std::unique_ptr<Classifier>> layer1,
                             LogisticRegression meta, int num_classes)
    : layer1_(std::move(layer1)), meta_(std::move(meta)), num_classes_(num_classes) {}

std::vector<double> StackingModel::meta_features(const SparseRow& row) const {
  std::vector<double> f;
  f.reserve(layer1_.size() * static_cast<std::size_t>(num_classes_));
  for (const auto& m : layer1_) {
    const auto p = m->predict_proba(row);
    f.insert(f.end(), p.begin(), p.end());
  }
  return f;
}

std::vector<double> StackingModel::predict_proba(const SparseRow& row) const {
  return meta_.predict_proba(meta_features(row));
}

json StackingModel::to_json() const {
  json layer1 = json::array();
  for (const auto& m : layer1_) layer1.push_back(m->to_json());
  return json{{"type", "stacking"}, {"num_classes", num_classes_}, {"layer1", layer1},
              {"meta", meta_.to_json()}};
}

std::unique_ptr<StackingModel> StackingModel::from_json(const json& j) {
  std::vector<std::unique_ptr<Classifier>> layer1;
  for (const auto& m : j.at("layer1")) layer1.push_back(classifier_from_json(m));
  return std::make_unique<StackingModel>(std::move(layer1),
                                         LogisticRegression::from_json(j.at("meta")),
                                         j.at("num_classes").get<int>());
}

std::unique_ptr<Classifier> classifier_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "tree") return std::make_unique<DecisionTree>(DecisionTree::from_json(j));
  if (type == "forest") return std::make_unique<RandomForest>(RandomForest::from_json(j));
  if (type == "boosted") return std::make_unique<GradientBoosting>(GradientBoosting::from_json(j));
  if (type == "stacking") return StackingModel::from_json(j);
  throw ParseError("unknown classifier type '" + type + "'");
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("stacking needs at least 2 folds");
  if (labels.size() < static_cast<std::size_t>(folds)) {
    throw InvalidArgument("fewer rows than folds");
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  Rng rng(seed);
  std::vector<int> out(labels.size(), 0);
  int next = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (const std::size_t i : members) {
      out[i] = next;
      next = (next + 1) % folds;
    }
  }
  return out;
}

namespace {

bool folds_cover_classes(std::span<const int> labels, std::span<const int> folds, int n_folds) {
  const std::set<int> all(labels.begin(), labels.end());
  for (int f = 0; f < n_folds; ++f) {
    std::set<int> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] != f) seen.insert(labels[i]);
    }
    if (seen != all) return false;
  }
  return true;
}

TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> idx) {
  TrainingSet s;
  s.num_features = data.num_features;
  s.num_classes = data.num_classes;
  s.rows.reserve(idx.size());
  s.labels.reserve(idx.size());
  for (const std::size_t i : idx) {
    s.rows.push_back(data.rows[i]);
    s.labels.push_back(data.labels[i]);
  }
  return s;
}

}  // namespace

StackingFit train_stacking(const TrainingSet& data, const StackingConfig& config) {
  if (data.rows.empty()) throw InvalidArgument("cannot stack on empty data");
  constexpr int kAttempts = 4;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    auto folds = stratified_folds(data.labels, config.folds,
                                  sub_seed(config.seed, "folds", static_cast<std::uint64_t>(attempt)));
    if (folds_cover_classes(data.labels, folds, config.folds)) {
      return train_stacking(data, config, std::move(folds));
    }
  }
  throw ValidationError("stacking: some class is absent from a fold's training part after " +
                        std::to_string(kAttempts) + " stratified attempts; use fewer folds");
}

StackingFit train_stacking(const TrainingSet& data, const StackingConfig& config,
                           std::vector<int> folds) {
  if (config.layer1.empty()) throw InvalidArgument("stacking needs at least one layer-1 model");
  if (config.folds < 2) throw InvalidArgument("stacking needs at least 2 folds");
  if (folds.size() != data.rows.size()) throw InvalidArgument("fold assignment size mismatch");
  if (!folds_cover_classes(data.labels, folds, config.folds)) {
    throw ValidationError("stacking: some class is absent from a fold's training part");
  }
  const std::size_t n = data.rows.size();
  const auto k_classes = static_cast<std::size_t>(data.num_classes);
  const std::size_t width = config.layer1.size() * k_classes;

  StackingFit fit;
  fit.oof_meta_features.assign(n, std::vector<double>(width, 0.0));
  for (int f = 0; f < config.folds; ++f) {
    std::vector<std::size_t> train_idx, held_idx;
    for (std::size_t i = 0; i < n; ++i) (folds[i] == f ? held_idx : train_idx).push_back(i);
    if (held_idx.empty()) continue;
    const TrainingSet part = subset(data, train_idx);
    for (std::size_t m = 0; m < config.layer1.size(); ++m) {
      const auto model = fit_layer1(
          config.layer1[m], part,
          sub_seed(config.seed, "layer1", m * 1024 + static_cast<std::size_t>(f)));
      for (const std::size_t i : held_idx) {
        const auto p = model->predict_proba(data.rows[i]);
        std::copy(p.begin(), p.end(), fit.oof_meta_features[i].begin() + m * k_classes);
      }
    }
  }
  auto meta = LogisticRegression::fit(fit.oof_meta_features, data.labels, data.num_classes,
                                      config.meta);
  std::vector<std::unique_ptr<Classifier>> layer1;
  for (std::size_t m = 0; m < config.layer1.size(); ++m) {
    layer1.push_back(fit_layer1(config.layer1[m], data, sub_seed(config.seed, "layer1-final", m)));
  }
  fit.model = std::make_unique<StackingModel>(std::move(layer1), std::move(meta), data.num_classes);
  fit.folds = std::move(folds);
  return fit;
}

}  // namespace genlevel
