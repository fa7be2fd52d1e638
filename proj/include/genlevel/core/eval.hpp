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

#ifndef GENLEVEL_CORE_EVAL_HPP_
#define GENLEVEL_CORE_EVAL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "genlevel/core/corpus.hpp"

namespace genlevel {

struct LevelScores {
  int level = 1;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // N_i: records whose majority level is this level
  std::size_t predicted = 0;  // records predicted at this level
};

enum class WeightingMode {
  kLiteral,  // sum_i Score_i / N_i
  kSupport,  // sum_i (N_i / N) * Score_i
};

struct WeightedScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<int> excluded_levels;  // levels with zero support
};

// Levels with zero support are excluded from both sums and reported.
WeightedScores weighted_scores(std::span<const LevelScores> per_level, WeightingMode mode);

struct ConfusionMatrix {
  int num_levels = 0;
  std::vector<std::vector<std::size_t>> counts;  // [true - 1][pred - 1]
  std::vector<std::vector<double>> normalized;   // rows divided by row sum
};

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> truth,
                                 int num_levels);

struct EvalResult {
  std::size_t n = 0;
  double majority_vote_acc = 0.0;
  double all_selections_acc = 0.0;
  std::vector<LevelScores> per_level;
  WeightedScores weighted_literal;
  WeightedScores weighted_support;
  ConfusionMatrix confusion;
};

// Per-level scores are computed against majority labels. The level range
// is 1..max(num_levels, largest label or prediction seen).
EvalResult evaluate(std::span<const int> predictions, std::span<const PiiRecord> records,
                    int num_levels = 0);

std::string eval_to_json(const EvalResult& result);
std::string eval_to_text(const EvalResult& result);
std::string confusion_counts_csv(const ConfusionMatrix& cm);
std::string confusion_normalized_csv(const ConfusionMatrix& cm);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_EVAL_HPP_
