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

#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "genlevel/core/random.hpp"

namespace genlevel::testing {
namespace {

constexpr std::array<const char*, 40> kTopics = {
    "violin",  "harbor",   "glacier", "orchard", "lantern", "compass", "meadow",  "falcon",
    "granite", "tapestry", "cobalt",  "saffron", "quarry",  "monsoon", "pilgrim", "beacon",
    "cypress", "marble",   "thunder", "velvet",  "canyon",  "ember",   "walnut",  "harvest",
    "galaxy",  "lagoon",   "rooster", "saddle",  "tundra",  "willow",  "anchor",  "bramble",
    "citadel", "dynamo",   "fjord",   "gazelle", "hemlock", "ivory",   "juniper", "kettle"};

constexpr std::array<const char*, 16> kFirstNames = {
    "Arlo", "Bette", "Cyrus", "Dagny", "Ezra", "Freya", "Gideon", "Hester",
    "Ione", "Jasper", "Kaia", "Lionel", "Mabel", "Niles", "Odile", "Pascal"};

constexpr std::array<const char*, 16> kLastNames = {
    "Abbott", "Brennan", "Castell", "Dorsey", "Ellery", "Fenwick", "Garrow", "Holt",
    "Irving", "Jessop", "Keane", "Lowell", "Marsh", "Norwood", "Oakes", "Prescott"};

constexpr std::array<const char*, 3> kMarkers = {"notable", "honorary", "celebrated"};
constexpr std::array<const char*, 6> kDistractors = {"minor", "local", "obscure",
                                                     "passing", "casual", "remote"};

constexpr std::array<const char*, 4> kTypes = {"PERSON", "LOC", "DATETIME", "ORG"};

struct Template {
  const char* before;  // text before the span, with {T} for the topic
  const char* after;   // text after the span
};

constexpr std::array<Template, 4> kTemplates = {{
    {"Famous for the {T}, ", " later settled abroad."},
    {"In stories about the {T}, ", " appears near the end."},
    {"The archive on the {T} lists ", " among its donors."},
    {"Critics linked the {T} with ", " for many years."},
}};

std::string fill(const char* pattern, const std::string& topic) {
  std::string s = pattern;
  const auto at = s.find("{T}");
  if (at != std::string::npos) s.replace(at, 3, topic);
  return s;
}

// Preferred target position for a (type, m) group, in 1..m.
int preferred_position(std::size_t type_index, int m) {
  return static_cast<int>((type_index * 2 + static_cast<std::size_t>(m)) % static_cast<std::size_t>(m)) + 1;
}

}  // namespace

std::vector<PiiRecord> synthetic_records(const SyntheticOptions& options) {
  Rng rng(sub_seed(options.seed, "synthetic"));
  std::vector<PiiRecord> out;
  out.reserve(options.count);
  for (std::size_t n = 0; n < options.count; ++n) {
    const int span_m = options.max_candidates - options.min_candidates + 1;
    const int m = options.min_candidates + static_cast<int>(rng.below(static_cast<std::size_t>(span_m)));
    const std::size_t type_index = rng.below(kTypes.size());

    std::vector<std::size_t> topic_ids(kTopics.size());
    for (std::size_t i = 0; i < topic_ids.size(); ++i) topic_ids[i] = i;
    rng.shuffle(std::span<std::size_t>(topic_ids));
    topic_ids.resize(static_cast<std::size_t>(m));

    int target;
    if (rng.uniform() < options.position_skew) {
      target = preferred_position(type_index, m);
    } else {
      target = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m)));
    }
    const std::string topic = kTopics[topic_ids[static_cast<std::size_t>(target - 1)]];

    const std::string span = std::string(kFirstNames[rng.below(kFirstNames.size())]) + " " +
                             kLastNames[rng.below(kLastNames.size())];
    const auto& tpl = kTemplates[rng.below(kTemplates.size())];
    const std::string before = fill(tpl.before, topic);

    PiiRecord r;
    r.id = std::string(options.id_prefix) + "-" + std::to_string(n);
    r.text = before + span + tpl.after;
    r.span_start = before.size();
    r.span_end = before.size() + span.size();
    r.span_text = span;
    r.semantic_type.label = kTypes[type_index];
    for (int i = 0; i < m; ++i) {
      const char* word = kTopics[topic_ids[static_cast<std::size_t>(i)]];
      if (options.rule == SyntheticRule::kMarker) {
        word = i + 1 == target ? kMarkers[rng.below(kMarkers.size())]
                               : kDistractors[rng.below(kDistractors.size())];
      }
      r.candidates.push_back(std::string("a ") + word + " figure");
    }
    r.majority_level = target;
    r.all_levels = {target};
    if (rng.uniform() < options.extra_level_rate) {
      const int extra = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m)));
      if (extra != target) r.all_levels.push_back(extra);
      std::sort(r.all_levels.begin(), r.all_levels.end());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PiiRecord> separable_records() {
  SyntheticOptions options;
  options.count = 50;
  options.seed = 20260101;
  options.rule = SyntheticRule::kMarker;
  options.id_prefix = "sep";
  return synthetic_records(options);
}

BenchmarkSplits benchmark_splits(std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
  SyntheticOptions options;
  options.count = n_train + n_test;
  options.seed = seed;
  options.position_skew = 0.6;
  options.id_prefix = "bench";
  auto all = synthetic_records(options);
  BenchmarkSplits splits;
  splits.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
  splits.test.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
  return splits;
}

}  // namespace genlevel::testing
