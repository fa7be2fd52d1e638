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

#include "genlevel/core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "genlevel/core/error.hpp"
#include "genlevel/core/text.hpp"
#include "json.hpp"

namespace genlevel {

using nlohmann::json;

SemanticTypeRegistry::SemanticTypeRegistry() : SemanticTypeRegistry(default_labels()) {}

SemanticTypeRegistry::SemanticTypeRegistry(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  labels_ = std::move(labels);
  for (std::size_t i = 0; i < labels_.size(); ++i) codes_.emplace(labels_[i], static_cast<int>(i));
}

const std::vector<std::string>& SemanticTypeRegistry::default_labels() {
  static const std::vector<std::string> labels = {"DATETIME", "DEM",    "LOC",     "MISC",
                                                  "ORG",      "PERSON", "QUANTITY"};
  return labels;
}

SemanticTypeRegistry SemanticTypeRegistry::from_ordered(std::vector<std::string> labels) {
  SemanticTypeRegistry r(std::vector<std::string>{});
  for (auto& l : labels) {
    if (r.codes_.count(l) != 0) throw ValidationError("duplicate semantic type '" + l + "'");
    r.codes_.emplace(l, static_cast<int>(r.labels_.size()));
    r.labels_.push_back(std::move(l));
  }
  return r;
}

SemanticType SemanticTypeRegistry::resolve(std::string_view label) {
  if (auto code = find(label)) return {std::string(label), *code};
  const int code = static_cast<int>(labels_.size());
  labels_.emplace_back(label);
  codes_.emplace(std::string(label), code);
  warn("unknown semantic type '" + std::string(label) + "' added with code " +
       std::to_string(code));
  return {std::string(label), code};
}

std::optional<int> SemanticTypeRegistry::find(std::string_view label) const {
  const auto it = codes_.find(label);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

void validate_record(const PiiRecord& r, std::string_view pad_token) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("record '" + r.id + "': " + what);
  };
  if (r.id.empty()) throw ValidationError("record with empty id");
  if (r.span_start > r.span_end) fail("span_start > span_end");
  const auto bounds = text::code_point_boundaries(r.text);
  const std::size_t len = bounds.size() - 1;
  if (r.span_end > len) {
    fail("span_end " + std::to_string(r.span_end) + " exceeds text length " + std::to_string(len));
  }
  const std::string_view span(r.text.data() + bounds[r.span_start],
                              bounds[r.span_end] - bounds[r.span_start]);
  if (span != r.span_text) {
    fail("text[" + std::to_string(r.span_start) + ".." + std::to_string(r.span_end) + ") is '" +
         std::string(span) + "', expected span_text '" + r.span_text + "'");
  }
  if (r.candidates.empty()) fail("no candidates");
  for (const auto& c : r.candidates) {
    if (c == pad_token) fail("candidate list contains the pad token");
    text::code_point_boundaries(c);
  }
  const int m = r.num_candidates();
  if (r.majority_level < 1 || r.majority_level > m) {
    fail("majority_level " + std::to_string(r.majority_level) + " outside [1, " +
         std::to_string(m) + "]");
  }
  if (r.all_levels.empty()) fail("all_levels is empty");
  for (const int level : r.all_levels) {
    if (level < 1 || level > m) {
      fail("all_levels entry " + std::to_string(level) + " outside [1, " + std::to_string(m) + "]");
    }
  }
  if (!std::binary_search(r.all_levels.begin(), r.all_levels.end(), r.majority_level)) {
    fail("majority_level not in all_levels");
  }
}

PiiRecord parse_record(std::string_view line, SemanticTypeRegistry& types) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  PiiRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.span_start = j.at("span_start").get<std::size_t>();
    r.span_end = j.at("span_end").get<std::size_t>();
    r.span_text = j.at("span_text").get<std::string>();
    r.semantic_type = types.resolve(j.at("semantic_type").get<std::string>());
    r.candidates = j.at("candidates").get<std::vector<std::string>>();
    r.majority_level = j.at("majority_level").get<int>();
    r.all_levels = j.at("all_levels").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad record schema: ") + e.what());
  }
  std::sort(r.all_levels.begin(), r.all_levels.end());
  r.all_levels.erase(std::unique(r.all_levels.begin(), r.all_levels.end()), r.all_levels.end());
  validate_record(r);
  return r;
}

std::string serialize_record(const PiiRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["text"] = r.text;
  j["span_start"] = r.span_start;
  j["span_end"] = r.span_end;
  j["span_text"] = r.span_text;
  j["semantic_type"] = r.semantic_type.label;
  j["candidates"] = r.candidates;
  j["majority_level"] = r.majority_level;
  j["all_levels"] = r.all_levels;
  return j.dump();
}

Dataset parse_dataset(std::string_view contents, Split split) {
  Dataset ds;
  ds.split = split;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    std::string_view line = contents.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      PiiRecord r = parse_record(line, ds.types);
      if (!seen.insert(r.id).second) throw ValidationError("duplicate record id '" + r.id + "'");
      ds.records.push_back(std::move(r));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), split);
}

void save_dataset(const std::filesystem::path& path, std::span<const PiiRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset '" + path.string() + "'");
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

std::vector<PiiRecord> filter_by_max_candidates(std::span<const PiiRecord> records,
                                                int max_candidates) {
  if (max_candidates < 1) throw InvalidArgument("C must be >= 1");
  std::vector<PiiRecord> out;
  for (const auto& r : records) {
    if (r.num_candidates() <= max_candidates) out.push_back(r);
  }
  return out;
}

DatasetStats compute_stats(std::span<const PiiRecord> records, std::span<const int> c_values) {
  DatasetStats s;
  s.record_count = records.size();
  for (const auto& r : records) {
    ++s.histogram_num_candidates[r.num_candidates()];
    ++s.histogram_selected_level[r.majority_level];
  }
  for (const int c : c_values) {
    std::size_t kept = 0;
    for (const auto& r : records) kept += r.num_candidates() <= c ? 1 : 0;
    s.coverage_at[c] = records.empty() ? 0.0 : static_cast<double>(kept) / records.size();
  }
  return s;
}

std::string stats_to_json(const DatasetStats& s) {
  json j = json::object();
  j["record_count"] = s.record_count;
  auto histogram = [](const std::map<int, std::size_t>& h) {
    json a = json::array();
    for (const auto& [k, v] : h) a.push_back({{"value", k}, {"count", v}});
    return a;
  };
  j["num_candidates"] = histogram(s.histogram_num_candidates);
  j["selected_level"] = histogram(s.histogram_selected_level);
  json cov = json::array();
  for (const auto& [c, f] : s.coverage_at) cov.push_back({{"C", c}, {"fraction", f}});
  j["coverage"] = cov;
  return j.dump(2);
}

}  // namespace genlevel
