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

#include "genlevel/core/feature_model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "genlevel/core/error.hpp"

namespace genlevel {

using nlohmann::json;

FeatureModelKind feature_model_kind_from_string(const std::string& name) {
  if (name == "tree") return FeatureModelKind::kTree;
  if (name == "forest") return FeatureModelKind::kForest;
  if (name == "boosted") return FeatureModelKind::kBoosted;
  if (name == "stacking") return FeatureModelKind::kStacking;
  throw InvalidArgument("unknown feature model '" + name + "'");
}

std::string to_string(FeatureModelKind kind) {
  switch (kind) {
    case FeatureModelKind::kTree: return "tree";
    case FeatureModelKind::kForest: return "forest";
    case FeatureModelKind::kBoosted: return "boosted";
    case FeatureModelKind::kStacking: return "stacking";
  }
  return "stacking";
}

TrainingSet build_training_set(std::span<const PiiRecord> records, const Vocabulary& vocab,
                               const SemanticTypeRegistry& types) {
  TrainingSet data;
  data.num_features = feature_count(vocab.size());
  for (const auto& r : records) {
    data.rows.push_back(to_row(vectorize(r, vocab, types), vocab.size()));
    data.labels.push_back(r.majority_level - 1);
    data.num_classes = std::max(data.num_classes, r.num_candidates());
  }
  return data;
}

std::vector<double> restrict_to_candidates(std::span<const double> distribution,
                                           int num_candidates) {
  const auto m = static_cast<std::size_t>(std::max(1, num_candidates));
  std::vector<double> out(distribution.begin(), distribution.end());
  if (out.size() < m) out.resize(m, 0.0);
  for (std::size_t k = m; k < out.size(); ++k) out[k] = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) total += out[k];
  if (total > 0.0) {
    for (std::size_t k = 0; k < m; ++k) out[k] /= total;
  }
  return out;
}

int argmax_level(std::span<const double> distribution, int num_candidates) {
  const auto restricted = restrict_to_candidates(distribution, num_candidates);
  const auto m = static_cast<std::size_t>(std::max(1, num_candidates));
  std::size_t best = 0;
  for (std::size_t k = 1; k < m; ++k) {
    if (restricted[k] > restricted[best]) best = k;
  }
  return static_cast<int>(best) + 1;
}

FeatureModel FeatureModel::train(std::span<const PiiRecord> records,
                                 const FeatureModelConfig& config) {
  if (records.empty()) throw InvalidArgument("empty training set");
  FeatureModel model;
  model.kind_ = config.kind;
  model.vocab_ = Vocabulary::build(records);
  // Codes follow the default label set plus any extra training labels.
  for (const auto& r : records) {
    if (!model.types_.find(r.semantic_type.label)) model.types_.resolve(r.semantic_type.label);
  }
  const TrainingSet data = build_training_set(records, model.vocab_, model.types_);

  TreeParams tree;
  tree.criterion = config.criterion;
  tree.max_depth = config.max_depth;
  tree.seed = config.seed;
  ForestParams forest;
  forest.tree.criterion = config.criterion;
  forest.tree.max_depth = config.max_depth;
  forest.n_trees = config.n_trees;
  forest.bootstrap = config.bootstrap;
  forest.seed = config.seed;
  BoostParams boost;
  boost.n_rounds = config.boost_rounds;
  boost.learning_rate = config.boost_learning_rate;
  boost.max_depth = config.boost_depth;
  boost.seed = config.seed;

  switch (config.kind) {
    case FeatureModelKind::kTree:
      model.classifier_ = std::make_shared<DecisionTree>(DecisionTree::fit(data, tree));
      break;
    case FeatureModelKind::kForest:
      model.classifier_ = std::make_shared<RandomForest>(RandomForest::fit(data, forest));
      break;
    case FeatureModelKind::kBoosted:
      model.classifier_ = std::make_shared<GradientBoosting>(GradientBoosting::fit(data, boost));
      break;
    case FeatureModelKind::kStacking: {
      StackingConfig sc = StackingConfig::defaults();
      for (auto& spec : sc.layer1) {
        spec.forest.n_trees = config.n_trees;
        spec.forest.bootstrap = config.bootstrap;
        spec.forest.tree.max_depth = config.max_depth;
        spec.boost = boost;
      }
      sc.folds = config.folds;
      sc.seed = config.seed;
      auto fit = train_stacking(data, sc);
      model.classifier_ = std::shared_ptr<const Classifier>(std::move(fit.model));
      break;
    }
  }
  return model;
}

std::vector<double> FeatureModel::predict_distribution(const PiiRecord& record) const {
  return classifier_->predict_proba(to_row(vectorize(record, vocab_, types_), vocab_.size()));
}

int FeatureModel::predict_level(const PiiRecord& record) const {
  return argmax_level(predict_distribution(record), record.num_candidates());
}

json FeatureModel::to_json() const {
  return json{{"format", "genlevel-feature-model"},
              {"version", 1},
              {"kind", to_string(kind_)},
              {"semantic_types", types_.labels()},
              {"vocabulary", vocab_.to_json()},
              {"model", classifier_->to_json()}};
}

FeatureModel FeatureModel::from_json(const json& j) {
  FeatureModel m;
  try {
    if (j.at("format").get<std::string>() != "genlevel-feature-model") {
      throw ParseError("not a feature model file");
    }
    m.kind_ = feature_model_kind_from_string(j.at("kind").get<std::string>());
    // Preserve the stored code order exactly rather than re-sorting.
    const auto labels = j.at("semantic_types").get<std::vector<std::string>>();
    m.types_ = SemanticTypeRegistry::from_ordered(labels);
    m.vocab_ = Vocabulary::from_json(j.at("vocabulary"));
    m.classifier_ = std::shared_ptr<const Classifier>(classifier_from_json(j.at("model")));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad feature model: ") + e.what());
  }
  return m;
}

void FeatureModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write feature model '" + path.string() + "'");
  out << to_json().dump() << '\n';
}

FeatureModel FeatureModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(json::parse(buf.str()));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("bad feature model: ") + e.what());
  }
}

BaselineStrategy baseline_strategy_from_string(const std::string& name) {
  if (name == "most_frequent_level" || name == "most-frequent") {
    return BaselineStrategy::kMostFrequentLevel;
  }
  if (name == "first_candidate" || name == "first-candidate") {
    return BaselineStrategy::kFirstCandidate;
  }
  throw InvalidArgument("unknown baseline strategy '" + name + "'");
}

Baseline Baseline::fit(std::span<const PiiRecord> train, BaselineStrategy strategy) {
  Baseline b;
  if (strategy == BaselineStrategy::kFirstCandidate) return b;
  if (train.empty()) throw InvalidArgument("most_frequent_level needs training records");
  std::map<int, std::size_t> counts;
  for (const auto& r : train) ++counts[r.majority_level];
  std::size_t best = 0;
  for (const auto& [level, n] : counts) {
    if (n > best) {
      best = n;
      b.level_ = level;
    }
  }
  return b;
}

int Baseline::predict(const PiiRecord& record) const {
  return std::min(level_, record.num_candidates());
}

std::vector<int> baseline_predict(std::span<const PiiRecord> records, const Baseline& baseline) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(baseline.predict(r));
  return out;
}

}  // namespace genlevel
