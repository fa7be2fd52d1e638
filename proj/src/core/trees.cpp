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

#include "genlevel/core/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "genlevel/core/error.hpp"
#include "genlevel/core/parallel.hpp"
#include "genlevel/core/random.hpp"

namespace genlevel {

using nlohmann::json;

double gini_impurity(std::span<const double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (const double x : w) sum_sq += (x / total) * (x / total);
  return 1.0 - sum_sq;
}

double entropy_impurity(std::span<const double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const double x : w) {
    if (x <= 0.0) continue;
    const double p = x / total;
    h -= p * std::log2(p);
  }
  return h;
}

Criterion criterion_from_string(const std::string& name) {
  if (name == "gini") return Criterion::kGini;
  if (name == "entropy") return Criterion::kEntropy;
  if (name == "squared_error") return Criterion::kSquaredError;
  throw InvalidArgument("unknown split criterion '" + name + "'");
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::kGini: return "gini";
    case Criterion::kEntropy: return "entropy";
    case Criterion::kSquaredError: return "squared_error";
  }
  return "gini";
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double hi = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& x : p) {
    x = std::exp(x - hi);
    z += x;
  }
  for (double& x : p) x /= z;
  return p;
}

// Stats are a small vector: per-class weights for classification,
// (w, w*y, w*y^2) for regression.
class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseRow> rows, std::size_t num_features, const TreeParams& params,
              int num_classes, std::span<const int> labels, std::span<const double> targets,
              std::span<const double> weights, const DecisionTree::LeafFn* leaf_fn)
      : rows_(rows),
        params_(params),
        num_classes_(num_classes),
        labels_(labels),
        targets_(targets),
        weights_(weights),
        leaf_fn_(leaf_fn),
        rng_(params.seed),
        buckets_(num_features) {
    stat_size_ = num_classes_ > 0 ? static_cast<std::size_t>(num_classes_) : 3;
  }

  DecisionTree build() {
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (weight(i) > 0.0) samples.push_back(i);
    }
    if (samples.empty()) throw InvalidArgument("cannot fit a tree on an empty sample");
    tree_.num_classes_ = num_classes_;
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool valid = false;
    double gain = -std::numeric_limits<double>::infinity();
    std::uint32_t feature = 0;
    double threshold = 0.0;
  };

  double weight(std::size_t i) const { return weights_.empty() ? 1.0 : weights_[i]; }

  void add(std::vector<double>& s, std::size_t i, double sign = 1.0) const {
    const double w = sign * weight(i);
    if (num_classes_ > 0) {
      s[static_cast<std::size_t>(labels_[i])] += w;
    } else {
      const double y = targets_[i];
      s[0] += w;
      s[1] += w * y;
      s[2] += w * y * y;
    }
  }

  double total_weight(const std::vector<double>& s) const {
    return num_classes_ > 0 ? std::accumulate(s.begin(), s.end(), 0.0) : s[0];
  }

  double impurity(const std::vector<double>& s) const {
    switch (params_.criterion) {
      case Criterion::kGini: return gini_impurity(s);
      case Criterion::kEntropy: return entropy_impurity(s);
      case Criterion::kSquaredError: {
        if (s[0] <= 0.0) return 0.0;
        const double mean = s[1] / s[0];
        return std::max(0.0, s[2] / s[0] - mean * mean);
      }
    }
    return 0.0;
  }

  std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) const {
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::max(0.0, a[k] - b[k]);
    if (num_classes_ == 0) out[1] = a[1] - b[1];
    return out;
  }

  int make_leaf(std::span<const std::size_t> samples, const std::vector<double>& stats) {
    DecisionTree::Node node;
    if (num_classes_ > 0) {
      const double total = total_weight(stats);
      node.value.resize(stats.size());
      for (std::size_t k = 0; k < stats.size(); ++k) node.value[k] = stats[k] / total;
    } else {
      node.value = {leaf_fn_ != nullptr ? (*leaf_fn_)(samples)
                                        : (stats[0] > 0.0 ? stats[1] / stats[0] : 0.0)};
    }
    tree_.nodes_.push_back(std::move(node));
    return static_cast<int>(tree_.nodes_.size()) - 1;
  }

  int grow(std::vector<std::size_t>& samples, int depth) {
    std::vector<double> parent(stat_size_, 0.0);
    for (const std::size_t i : samples) add(parent, i);
    const double parent_impurity = impurity(parent);
    if (depth >= params_.max_depth || samples.size() < params_.min_samples_split ||
        samples.size() < 2 * params_.min_samples_leaf || parent_impurity <= 1e-14) {
      return make_leaf(samples, parent);
    }
    const Split split = best_split(samples, parent, parent_impurity);
    if (!split.valid) return make_leaf(samples, parent);

    std::vector<std::size_t> left, right;
    for (const std::size_t i : samples) {
      (rows_[i].get(split.feature) <= split.threshold ? left : right).push_back(i);
    }
    const int id = static_cast<int>(tree_.nodes_.size());
    tree_.nodes_.emplace_back();
    tree_.nodes_[id].feature = static_cast<int>(split.feature);
    tree_.nodes_[id].threshold = split.threshold;
    tree_.nodes_[id].impurity_decrease = std::max(0.0, split.gain);
    samples.clear();
    samples.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes_[id].left = l;
    tree_.nodes_[id].right = r;
    return id;
  }

  Split best_split(std::span<const std::size_t> samples, const std::vector<double>& parent,
                   double parent_impurity) {
    std::vector<std::uint32_t> touched;
    for (const std::size_t i : samples) {
      const auto& row = rows_[i];
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        auto& bucket = buckets_[row.index[k]];
        if (bucket.empty()) touched.push_back(row.index[k]);
        bucket.emplace_back(row.value[k], i);
      }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<std::uint32_t> features = touched;
    if (params_.sqrt_features && features.size() > 1) {
      const auto k = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(features.size()))));
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(features[j], features[j + rng_.below(features.size() - j)]);
      }
      features.resize(k);
      std::sort(features.begin(), features.end());
    }

    Split best;
    const double total = total_weight(parent);
    const std::size_t n = samples.size();
    for (const std::uint32_t f : features) {
      auto& entries = buckets_[f];
      std::sort(entries.begin(), entries.end());
      std::vector<double> nonzero(stat_size_, 0.0);
      for (const auto& [v, i] : entries) add(nonzero, i);
      const std::vector<double> zero_stats = minus(parent, nonzero);
      const std::size_t zero_count = n - entries.size();

      std::vector<double> left(stat_size_, 0.0);
      std::size_t left_count = 0;
      bool has_prev = false;
      double prev = 0.0;
      auto consider = [&](double next) {
        if (!has_prev || !(next > prev)) return;
        const std::size_t right_count = n - left_count;
        if (left_count < params_.min_samples_leaf || right_count < params_.min_samples_leaf) return;
        const std::vector<double> right = minus(parent, left);
        const double wl = total_weight(left);
        const double wr = total - wl;
        if (wl <= 0.0 || wr <= 0.0) return;
        const double gain =
            parent_impurity - (wl / total) * impurity(left) - (wr / total) * impurity(right);
        if (gain > best.gain + 1e-12) {
          best.valid = true;
          best.gain = gain;
          best.feature = f;
          best.threshold = prev + (next - prev) / 2.0;
        }
      };
      auto zero_block = [&] {
        if (zero_count == 0) return;
        consider(0.0);
        for (std::size_t k = 0; k < stat_size_; ++k) left[k] += zero_stats[k];
        left_count += zero_count;
        has_prev = true;
        prev = 0.0;
      };
      bool zero_done = false;
      for (std::size_t e = 0; e < entries.size();) {
        const double v = entries[e].first;
        if (!zero_done && v > 0.0) {
          zero_block();
          zero_done = true;
        }
        consider(v);
        while (e < entries.size() && entries[e].first == v) {
          add(left, entries[e].second);
          ++left_count;
          ++e;
        }
        has_prev = true;
        prev = v;
      }
      if (!zero_done) zero_block();
    }
    for (const std::uint32_t f : touched) buckets_[f].clear();
    return best;
  }

  std::span<const SparseRow> rows_;
  TreeParams params_;
  int num_classes_;
  std::span<const int> labels_;
  std::span<const double> targets_;
  std::span<const double> weights_;
  const DecisionTree::LeafFn* leaf_fn_;
  Rng rng_;
  std::vector<std::vector<std::pair<double, std::size_t>>> buckets_;
  std::size_t stat_size_ = 0;
  DecisionTree tree_;
};

DecisionTree DecisionTree::fit(const TrainingSet& data, const TreeParams& params,
                               std::span<const double> sample_weight) {
  if (data.rows.empty()) throw InvalidArgument("cannot fit a tree on empty data");
  if (data.rows.size() != data.labels.size()) throw InvalidArgument("rows/labels size mismatch");
  if (!sample_weight.empty() && sample_weight.size() != data.rows.size()) {
    throw InvalidArgument("sample weight size mismatch");
  }
  if (params.criterion == Criterion::kSquaredError) {
    throw InvalidArgument("classification trees need gini or entropy");
  }
  for (const int y : data.labels) {
    if (y < 0 || y >= data.num_classes) throw InvalidArgument("label outside class range");
  }
  TreeBuilder builder(data.rows, data.num_features, params, data.num_classes, data.labels, {},
                      sample_weight, nullptr);
  return builder.build();
}

DecisionTree DecisionTree::fit_regression(std::span<const SparseRow> rows,
                                          std::span<const double> targets,
                                          std::size_t num_features, const TreeParams& params,
                                          const LeafFn& leaf_value) {
  if (rows.empty()) throw InvalidArgument("cannot fit a tree on empty data");
  TreeParams p = params;
  p.criterion = Criterion::kSquaredError;
  TreeBuilder builder(rows, num_features, p, 0, {}, targets, {}, leaf_value ? &leaf_value : nullptr);
  return builder.build();
}

const DecisionTree::Node& DecisionTree::leaf(const SparseRow& row) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& n = nodes_[id];
    id = row.get(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return nodes_[id];
}

std::vector<double> DecisionTree::predict_proba(const SparseRow& row) const {
  return leaf(row).value;
}

double DecisionTree::predict_value(const SparseRow& row) const { return leaf(row).value.at(0); }

int DecisionTree::depth() const {
  std::function<int(int)> walk = [&](int id) -> int {
    const auto& n = nodes_[id];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return nodes_.empty() ? 0 : walk(0);
}

json DecisionTree::to_json() const {
  std::function<json(int)> node_json = [&](int id) -> json {
    const auto& n = nodes_[id];
    if (n.feature < 0) return json{{"leaf", n.value}};
    return json{{"feature", n.feature},
                {"threshold", n.threshold},
                {"impurity_decrease", n.impurity_decrease},
                {"left", node_json(n.left)},
                {"right", node_json(n.right)}};
  };
  return json{{"type", "tree"}, {"num_classes", num_classes_}, {"root", node_json(0)}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree t;
  t.num_classes_ = j.at("num_classes").get<int>();
  std::function<int(const json&)> read = [&](const json& n) -> int {
    const int id = static_cast<int>(t.nodes_.size());
    t.nodes_.emplace_back();
    if (n.contains("leaf")) {
      t.nodes_[id].value = n.at("leaf").get<std::vector<double>>();
      return id;
    }
    t.nodes_[id].feature = n.at("feature").get<int>();
    t.nodes_[id].threshold = n.at("threshold").get<double>();
    t.nodes_[id].impurity_decrease = n.value("impurity_decrease", 0.0);
    const int l = read(n.at("left"));
    const int r = read(n.at("right"));
    t.nodes_[id].left = l;
    t.nodes_[id].right = r;
    return id;
  };
  read(j.at("root"));
  return t;
}

RandomForest RandomForest::fit(const TrainingSet& data, const ForestParams& params) {
  if (params.n_trees < 1) throw InvalidArgument("forest needs at least one tree");
  RandomForest forest;
  forest.num_classes_ = data.num_classes;
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  forest.seeds_.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) forest.seeds_[t] = sub_seed(params.seed, "tree", t);
  std::vector<DecisionTree> trees(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    TreeParams tp = params.tree;
    tp.seed = sub_seed(forest.seeds_[t], "features");
    if (!params.bootstrap) {
      trees[t] = DecisionTree::fit(data, tp);
      return;
    }
    Rng rng(sub_seed(forest.seeds_[t], "bootstrap"));
    std::vector<double> weight(data.rows.size(), 0.0);
    for (std::size_t k = 0; k < data.rows.size(); ++k) weight[rng.below(data.rows.size())] += 1.0;
    trees[t] = DecisionTree::fit(data, tp, weight);
  });
  forest.trees_ = std::move(trees);
  return forest;
}

std::vector<double> RandomForest::predict_proba(const SparseRow& row) const {
  std::vector<double> acc(static_cast<std::size_t>(num_classes_), 0.0);
  for (const auto& t : trees_) {
    const auto p = t.predict_proba(row);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
  }
  for (double& x : acc) x /= static_cast<double>(trees_.size());
  return acc;
}

json RandomForest::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return json{{"type", "forest"}, {"num_classes", num_classes_}, {"seeds", seeds_}, {"trees", trees}};
}

RandomForest RandomForest::from_json(const json& j) {
  RandomForest f;
  f.num_classes_ = j.at("num_classes").get<int>();
  f.seeds_ = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& t : j.at("trees")) f.trees_.push_back(DecisionTree::from_json(t));
  return f;
}

GradientBoosting GradientBoosting::fit(const TrainingSet& data, const BoostParams& params) {
  if (data.rows.empty()) throw InvalidArgument("cannot boost on empty data");
  const auto n = data.rows.size();
  const auto k_classes = static_cast<std::size_t>(data.num_classes);
  GradientBoosting model;
  model.learning_rate_ = params.learning_rate;
  model.init_.assign(k_classes, 0.0);
  {
    std::vector<double> counts(k_classes, 0.0);
    for (const int y : data.labels) counts[static_cast<std::size_t>(y)] += 1.0;
    for (std::size_t k = 0; k < k_classes; ++k) {
      model.init_[k] = std::log(std::max(counts[k] / static_cast<double>(n), 1e-9));
    }
  }
  std::vector<std::vector<double>> raw(n, model.init_);
  const double newton_scale = k_classes > 1 ? (k_classes - 1.0) / k_classes : 1.0;
  for (int round = 0; round < params.n_rounds; ++round) {
    std::vector<std::vector<double>> prob(n);
    for (std::size_t i = 0; i < n; ++i) prob[i] = softmax(raw[i]);
    std::vector<DecisionTree> trees(k_classes);
    parallel_for(k_classes, [&](std::size_t k) {
      std::vector<double> residual(n);
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = (data.labels[i] == static_cast<int>(k) ? 1.0 : 0.0) - prob[i][k];
      }
      const DecisionTree::LeafFn leaf = [&](std::span<const std::size_t> idx) {
        double num = 0.0, den = 0.0;
        for (const std::size_t i : idx) {
          num += residual[i];
          den += std::abs(residual[i]) * (1.0 - std::abs(residual[i]));
        }
        return den < 1e-12 ? 0.0 : newton_scale * num / den;
      };
      TreeParams tp;
      tp.max_depth = params.max_depth;
      tp.min_samples_leaf = params.min_samples_leaf;
      tp.seed = sub_seed(params.seed, "boost", static_cast<std::uint64_t>(round) * 64 + k);
      trees[k] = DecisionTree::fit_regression(data.rows, residual, data.num_features, tp, leaf);
    });
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < k_classes; ++k) {
        raw[i][k] += params.learning_rate * trees[k].predict_value(data.rows[i]);
      }
    }
    model.rounds_.push_back(std::move(trees));
  }
  return model;
}

std::vector<double> GradientBoosting::raw_scores(const SparseRow& row) const {
  std::vector<double> f = init_;
  for (const auto& trees : rounds_) {
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += learning_rate_ * trees[k].predict_value(row);
  }
  return f;
}

std::vector<double> GradientBoosting::predict_proba(const SparseRow& row) const {
  return softmax(raw_scores(row));
}

json GradientBoosting::to_json() const {
  json rounds = json::array();
  for (const auto& trees : rounds_) {
    json r = json::array();
    for (const auto& t : trees) r.push_back(t.to_json());
    rounds.push_back(r);
  }
  return json{{"type", "boosted"}, {"init", init_}, {"learning_rate", learning_rate_},
              {"rounds", rounds}};
}

GradientBoosting GradientBoosting::from_json(const json& j) {
  GradientBoosting g;
  g.init_ = j.at("init").get<std::vector<double>>();
  g.learning_rate_ = j.at("learning_rate").get<double>();
  for (const auto& r : j.at("rounds")) {
    std::vector<DecisionTree> trees;
    for (const auto& t : r) trees.push_back(DecisionTree::from_json(t));
    g.rounds_.push_back(std::move(trees));
  }
  return g;
}

}  // namespace genlevel
