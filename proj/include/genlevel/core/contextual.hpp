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

#ifndef GENLEVEL_CORE_CONTEXTUAL_HPP_
#define GENLEVEL_CORE_CONTEXTUAL_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "genlevel/core/corpus.hpp"

namespace genlevel {

inline constexpr std::string_view kDefaultPadToken = "[PAD]";

// A record padded to C candidates, with one generalized sentence per slot.
// Slot i (0-based) holds level i + 1.
struct ContextualExample {
  std::string record_id;
  std::string original_text;
  std::vector<std::string> padded_candidates;
  std::vector<std::string> generalized_sentences;
  std::vector<bool> pad_mask;  // true = real candidate
  int target_level = 1;
  std::vector<int> all_levels;

  int max_candidates() const { return static_cast<int>(padded_candidates.size()); }
};

// Pads the candidate list to C and splices each slot into the annotated
// span. Throws InvalidArgument if the record has more than C candidates.
ContextualExample build_contextual_example(const PiiRecord& record, int max_candidates,
                                           std::string_view pad_token = kDefaultPadToken);

// The record's text with the span replaced by the candidate at `level`.
std::string generalize_text(const PiiRecord& record, int level);

std::string contextual_to_json(const ContextualExample& example);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_CONTEXTUAL_HPP_
