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

#include "genlevel/core/contextual.hpp"

#include "genlevel/core/error.hpp"
#include "genlevel/core/text.hpp"
#include "json.hpp"

namespace genlevel {

ContextualExample build_contextual_example(const PiiRecord& record, int max_candidates,
                                           std::string_view pad_token) {
  if (max_candidates < 1) throw InvalidArgument("C must be >= 1");
  const int m = record.num_candidates();
  if (m > max_candidates) {
    throw InvalidArgument("record '" + record.id + "' has " + std::to_string(m) +
                          " candidates but C = " + std::to_string(max_candidates) +
                          "; filter records by max candidates first");
  }
  ContextualExample ex;
  ex.record_id = record.id;
  ex.original_text = record.text;
  ex.target_level = record.majority_level;
  ex.all_levels = record.all_levels;
  ex.padded_candidates.reserve(max_candidates);
  ex.generalized_sentences.reserve(max_candidates);
  ex.pad_mask.reserve(max_candidates);

  // Split once; every slot shares the same prefix and suffix.
  const auto b = text::code_point_boundaries(record.text);
  const std::string_view full(record.text);
  const std::string_view prefix = full.substr(0, b.at(record.span_start));
  const std::string_view suffix = full.substr(b.at(record.span_end));
  for (int i = 0; i < max_candidates; ++i) {
    const bool real = i < m;
    std::string candidate = real ? record.candidates[i] : std::string(pad_token);
    std::string sentence;
    sentence.reserve(prefix.size() + candidate.size() + suffix.size());
    sentence.append(prefix).append(candidate).append(suffix);
    ex.padded_candidates.push_back(std::move(candidate));
    ex.generalized_sentences.push_back(std::move(sentence));
    ex.pad_mask.push_back(real);
  }
  return ex;
}

std::string generalize_text(const PiiRecord& record, int level) {
  if (level < 1 || level > record.num_candidates()) {
    throw InvalidArgument("level " + std::to_string(level) + " outside [1, " +
                          std::to_string(record.num_candidates()) + "] for record '" + record.id +
                          "'");
  }
  return text::splice_code_points(record.text, record.span_start, record.span_end,
                                  record.candidates[level - 1]);
}

std::string contextual_to_json(const ContextualExample& ex) {
  nlohmann::json j = nlohmann::json::object();
  j["record_id"] = ex.record_id;
  j["original_text"] = ex.original_text;
  j["padded_candidates"] = ex.padded_candidates;
  j["generalized_sentences"] = ex.generalized_sentences;
  j["pad_mask"] = ex.pad_mask;
  j["target_level"] = ex.target_level;
  j["all_levels"] = ex.all_levels;
  return j.dump();
}

}  // namespace genlevel
