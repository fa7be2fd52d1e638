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

#include "genlevel/core/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "genlevel/core/error.hpp"
#include "json.hpp"

namespace genlevel {
namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

WeightedScores weighted_scores(std::span<const LevelScores> per_level, WeightingMode mode) {
  WeightedScores w;
  std::size_t total = 0;
  for (const auto& s : per_level) total += s.support;
  for (const auto& s : per_level) {
    if (s.support == 0) {
      w.excluded_levels.push_back(s.level);
      continue;
    }
    const auto n_i = static_cast<double>(s.support);
    if (mode == WeightingMode::kLiteral) {
      w.precision += s.precision / n_i;
      w.recall += s.recall / n_i;
      w.f1 += s.f1 / n_i;
    } else {
      w.precision += n_i * s.precision;
      w.recall += n_i * s.recall;
      w.f1 += n_i * s.f1;
    }
  }
  if (mode == WeightingMode::kSupport && total > 0) {
    const auto n = static_cast<double>(total);
    w.precision /= n;
    w.recall /= n;
    w.f1 /= n;
  }
  return w;
}

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> truth,
                                 int num_levels) {
  if (predictions.size() != truth.size()) {
    throw InvalidArgument("confusion matrix: predictions and labels differ in length");
  }
  ConfusionMatrix cm;
  cm.num_levels = num_levels;
  const auto l = static_cast<std::size_t>(num_levels);
  cm.counts.assign(l, std::vector<std::size_t>(l, 0));
  cm.normalized.assign(l, std::vector<double>(l, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 1 || truth[i] > num_levels || predictions[i] < 1 ||
        predictions[i] > num_levels) {
      throw InvalidArgument("confusion matrix: level outside 1.." + std::to_string(num_levels));
    }
    ++cm.counts[static_cast<std::size_t>(truth[i] - 1)][static_cast<std::size_t>(predictions[i] - 1)];
  }
  for (std::size_t r = 0; r < l; ++r) {
    std::size_t row_sum = 0;
    for (const std::size_t c : cm.counts[r]) row_sum += c;
    if (row_sum == 0) continue;
    for (std::size_t c = 0; c < l; ++c) {
      cm.normalized[r][c] = static_cast<double>(cm.counts[r][c]) / static_cast<double>(row_sum);
    }
  }
  return cm;
}

EvalResult evaluate(std::span<const int> predictions, std::span<const PiiRecord> records,
                    int num_levels) {
  if (predictions.size() != records.size()) {
    throw InvalidArgument("evaluate: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(records.size()) + " records");
  }
  EvalResult res;
  res.n = records.size();
  std::vector<int> truth;
  truth.reserve(records.size());
  int levels = std::max(num_levels, 1);
  std::size_t mv = 0, all = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    truth.push_back(r.majority_level);
    levels = std::max({levels, r.majority_level, predictions[i]});
    mv += predictions[i] == r.majority_level ? 1 : 0;
    all += std::binary_search(r.all_levels.begin(), r.all_levels.end(), predictions[i]) ? 1 : 0;
  }
  if (res.n > 0) {
    res.majority_vote_acc = static_cast<double>(mv) / static_cast<double>(res.n);
    res.all_selections_acc = static_cast<double>(all) / static_cast<double>(res.n);
  }
  res.confusion = confusion_matrix(predictions, truth, levels);
  for (int l = 1; l <= levels; ++l) {
    const auto k = static_cast<std::size_t>(l - 1);
    LevelScores s;
    s.level = l;
    const std::size_t tp = res.confusion.counts[k][k];
    for (std::size_t j = 0; j < static_cast<std::size_t>(levels); ++j) {
      s.support += res.confusion.counts[k][j];
      s.predicted += res.confusion.counts[j][k];
    }
    s.precision = s.predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(s.predicted);
    s.recall = s.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(s.support);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                         : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    res.per_level.push_back(s);
  }
  res.weighted_literal = weighted_scores(res.per_level, WeightingMode::kLiteral);
  res.weighted_support = weighted_scores(res.per_level, WeightingMode::kSupport);
  // sum_i N_i * (tp_i / N_i) / N is sum_i tp_i / N; summing the counts keeps
  // the identity with majority-vote accuracy exact in floating point.
  if (res.n > 0) res.weighted_support.recall = res.majority_vote_acc;
  return res;
}

std::string eval_to_json(const EvalResult& r) {
  using nlohmann::json;
  json j = json::object();
  j["n"] = r.n;
  j["majority_vote_acc"] = r.majority_vote_acc;
  j["all_selections_acc"] = r.all_selections_acc;
  json levels = json::array();
  for (const auto& s : r.per_level) {
    levels.push_back({{"level", s.level},
                      {"precision", s.precision},
                      {"recall", s.recall},
                      {"f1", s.f1},
                      {"support", s.support},
                      {"predicted", s.predicted}});
  }
  j["per_level"] = levels;
  auto weighted = [](const WeightedScores& w) {
    return json{{"precision", w.precision},
                {"recall", w.recall},
                {"f1", w.f1},
                {"excluded_levels", w.excluded_levels}};
  };
  j["weighted_support"] = weighted(r.weighted_support);
  j["weighted_literal"] = weighted(r.weighted_literal);
  j["confusion"] = {{"levels", r.confusion.num_levels},
                    {"counts", r.confusion.counts},
                    {"normalized", r.confusion.normalized}};
  return j.dump(2);
}

std::string eval_to_text(const EvalResult& r) {
  std::ostringstream out;
  out << "records          " << r.n << '\n';
  out << "majority vote    " << fixed(100.0 * r.majority_vote_acc, 2) << "%\n";
  out << "all selections   " << fixed(100.0 * r.all_selections_acc, 2) << "%\n\n";
  const std::size_t w = 24;
  out << pad_right("level", w) << pad_left("precision", 11) << pad_left("recall", 9)
      << pad_left("f1", 9) << pad_left("support", 9) << '\n';
  for (const auto& s : r.per_level) {
    out << pad_right(std::to_string(s.level), w) << pad_left(fixed(s.precision, 4), 11)
        << pad_left(fixed(s.recall, 4), 9) << pad_left(fixed(s.f1, 4), 9)
        << pad_left(std::to_string(s.support), 9) << '\n';
  }
  out << '\n';
  auto row = [&](const std::string& name, const WeightedScores& ws) {
    out << pad_right(name, w) << pad_left(fixed(ws.precision, 4), 11)
        << pad_left(fixed(ws.recall, 4), 9) << pad_left(fixed(ws.f1, 4), 9) << pad_left(std::to_string(r.n), 9)
        << '\n';
  };
  row("weighted avg (support)", r.weighted_support);
  row("weighted avg (1/N_i)", r.weighted_literal);
  out << "\nconfusion (rows = true level, row-normalized)\n";
  out << pad_right("", 6);
  for (int l = 1; l <= r.confusion.num_levels; ++l) out << pad_left(std::to_string(l), 8);
  out << '\n';
  for (int t = 0; t < r.confusion.num_levels; ++t) {
    out << pad_right(std::to_string(t + 1), 6);
    for (const double x : r.confusion.normalized[static_cast<std::size_t>(t)]) {
      out << pad_left(fixed(x, 4), 8);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

template <typename Cell>
std::string matrix_csv(const std::vector<std::vector<Cell>>& m, int levels,
                       std::string (*fmt)(const Cell&)) {
  std::ostringstream out;
  out << "true\\pred";
  for (int l = 1; l <= levels; ++l) out << ',' << l;
  out << '\n';
  for (int t = 0; t < levels; ++t) {
    out << t + 1;
    for (const auto& c : m[static_cast<std::size_t>(t)]) out << ',' << fmt(c);
    out << '\n';
  }
  return out.str();
}

std::string count_cell(const std::size_t& c) { return std::to_string(c); }
std::string rate_cell(const double& x) { return fixed(x, 6); }

}  // namespace

std::string confusion_counts_csv(const ConfusionMatrix& cm) {
  return matrix_csv<std::size_t>(cm.counts, cm.num_levels, &count_cell);
}

std::string confusion_normalized_csv(const ConfusionMatrix& cm) {
  return matrix_csv<double>(cm.normalized, cm.num_levels, &rate_cell);
}

}  // namespace genlevel
