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

#include "genlevel/core/features.hpp"

#include <algorithm>

#include "genlevel/core/error.hpp"
#include "genlevel/core/text.hpp"

namespace genlevel {

Vocabulary::Vocabulary(std::map<std::string, std::size_t, std::less<>> index)
    : index_(std::move(index)) {
  std::vector<bool> seen(index_.size(), false);
  for (const auto& [token, col] : index_) {
    if (col >= seen.size() || seen[col]) {
      throw ValidationError("vocabulary indices must be contiguous from 0");
    }
    seen[col] = true;
  }
}

Vocabulary Vocabulary::build(std::span<const PiiRecord> records, std::size_t min_count) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& r : records) {
    for (auto& tok : text::tokenize(r.span_text)) ++counts[std::move(tok)];
  }
  Vocabulary v;
  v.min_count_ = min_count;
  std::size_t next = 0;
  for (const auto& [token, n] : counts) {
    if (n >= min_count) v.index_.emplace(token, next++);
  }
  return v;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [token, col] : index_) j[token] = col;
  return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& [token, col] : j.items()) index.emplace(token, col.get<std::size_t>());
  return Vocabulary(std::move(index));
}

FeatureVector vectorize(const PiiRecord& record, const Vocabulary& vocab,
                        const SemanticTypeRegistry& types) {
  FeatureVector fv;
  std::map<std::size_t, int> counts;
  for (const auto& tok : text::tokenize(record.span_text)) {
    if (const auto col = vocab.find(tok)) ++counts[*col];
  }
  fv.counts.assign(counts.begin(), counts.end());
  if (const auto code = types.find(record.semantic_type.label)) {
    fv.semtype_code = *code;
  } else {
    fv.semtype_code = static_cast<int>(types.size());
  }
  fv.num_generalizations = record.num_candidates();
  return fv;
}

double SparseRow::get(std::uint32_t column) const {
  const auto it = std::lower_bound(index.begin(), index.end(), column);
  if (it == index.end() || *it != column) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

SparseRow to_row(const FeatureVector& fv, std::size_t vocab_size) {
  SparseRow row;
  row.index.reserve(fv.counts.size() + 2);
  row.value.reserve(fv.counts.size() + 2);
  for (const auto& [col, n] : fv.counts) {
    if (n == 0) continue;
    row.index.push_back(static_cast<std::uint32_t>(col));
    row.value.push_back(n);
  }
  if (fv.semtype_code != 0) {
    row.index.push_back(static_cast<std::uint32_t>(vocab_size));
    row.value.push_back(fv.semtype_code);
  }
  row.index.push_back(static_cast<std::uint32_t>(vocab_size + 1));
  row.value.push_back(fv.num_generalizations);
  return row;
}

}  // namespace genlevel
