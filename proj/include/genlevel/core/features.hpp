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

#ifndef GENLEVEL_CORE_FEATURES_HPP_
#define GENLEVEL_CORE_FEATURES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genlevel/core/corpus.hpp"
#include "json.hpp"

namespace genlevel {

// Unigram token -> column map over PII span text, built from the training
// split. Columns are assigned in sorted token order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::map<std::string, std::size_t, std::less<>> index);

  static Vocabulary build(std::span<const PiiRecord> records, std::size_t min_count = 1);

  std::optional<std::size_t> find(std::string_view token) const;
  std::size_t size() const { return index_.size(); }
  std::size_t min_count() const { return min_count_; }
  const std::map<std::string, std::size_t, std::less<>>& index() const { return index_; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t min_count_ = 1;
};

struct FeatureVector {
  std::vector<std::pair<std::size_t, int>> counts;  // (column, count), ascending column
  int semtype_code = 0;
  int num_generalizations = 1;

  bool operator==(const FeatureVector&) const = default;
};

// Token counts of the span plus the semantic-type code and #gen. Tokens not
// in the vocabulary are dropped; labels unknown to `types` get code
// types.size().
FeatureVector vectorize(const PiiRecord& record, const Vocabulary& vocab,
                        const SemanticTypeRegistry& types);

// Sparse row with implicit zeros, ascending column index.
struct SparseRow {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  double get(std::uint32_t column) const;
};

// Columns: [0, |vocab|) token counts, |vocab| semantic type, |vocab|+1 #gen.
SparseRow to_row(const FeatureVector& fv, std::size_t vocab_size);
inline std::size_t feature_count(std::size_t vocab_size) { return vocab_size + 2; }

// Inputs for any classifier. Labels are 0-based classes (level - 1).
struct TrainingSet {
  std::vector<SparseRow> rows;
  std::vector<int> labels;
  std::size_t num_features = 0;
  int num_classes = 0;
};

}  // namespace genlevel

#endif  // GENLEVEL_CORE_FEATURES_HPP_
