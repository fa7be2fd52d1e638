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

#ifndef GENLEVEL_CORE_CORPUS_HPP_
#define GENLEVEL_CORE_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genlevel {

struct SemanticType {
  std::string label;
  int code = 0;

  bool operator==(const SemanticType&) const = default;
};

// Closed label set with a stable label -> code bijection. Configured labels
// are coded in sorted order; labels first seen at load time are appended
// after them (with a warning) in first-seen order.
class SemanticTypeRegistry {
 public:
  // The default seven-category configuration.
  SemanticTypeRegistry();
  explicit SemanticTypeRegistry(std::vector<std::string> labels);

  static const std::vector<std::string>& default_labels();
  // Keeps `labels` in the given order: code i is labels[i].
  static SemanticTypeRegistry from_ordered(std::vector<std::string> labels);

  // Returns the type for `label`, appending it if unknown.
  SemanticType resolve(std::string_view label);
  std::optional<int> find(std::string_view label) const;

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int, std::less<>> codes_;
};

// One annotated PII span. Offsets count Unicode scalar values, end
// exclusive. Levels are 1-based: candidates[0] is level 1.
struct PiiRecord {
  std::string id;
  std::string text;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string span_text;
  SemanticType semantic_type;
  std::vector<std::string> candidates;
  int majority_level = 1;
  std::vector<int> all_levels;  // sorted, unique

  int num_candidates() const { return static_cast<int>(candidates.size()); }

  bool operator==(const PiiRecord&) const = default;
};

enum class Split { kTrain, kTest };

struct Dataset {
  Split split = Split::kTrain;
  SemanticTypeRegistry types;
  std::vector<PiiRecord> records;
};

// Throws ValidationError naming the record id when an invariant fails.
void validate_record(const PiiRecord& record, std::string_view pad_token = "[PAD]");

// Parses one JSON Lines row. Throws ParseError on malformed JSON or missing
// fields and ValidationError on invariant violations.
PiiRecord parse_record(std::string_view line, SemanticTypeRegistry& types);
std::string serialize_record(const PiiRecord& record);

Dataset load_dataset(const std::filesystem::path& path, Split split);
Dataset parse_dataset(std::string_view contents, Split split);
void save_dataset(const std::filesystem::path& path, std::span<const PiiRecord> records);

std::vector<PiiRecord> filter_by_max_candidates(std::span<const PiiRecord> records,
                                                int max_candidates);

struct DatasetStats {
  std::size_t record_count = 0;
  std::map<int, std::size_t> histogram_num_candidates;
  std::map<int, std::size_t> histogram_selected_level;
  std::map<int, double> coverage_at;  // C -> fraction with <= C candidates
};

DatasetStats compute_stats(std::span<const PiiRecord> records, std::span<const int> c_values);
std::string stats_to_json(const DatasetStats& stats);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_CORPUS_HPP_
