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

#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "genlevel/core/contextual.hpp"
#include "genlevel/core/corpus.hpp"
#include "genlevel/core/error.hpp"
#include "genlevel/core/text.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace genlevel;
using genlevel::testing::example_record;

TEST_CASE("worked example at C = 5: sentences and mask") {
  const auto ex = build_contextual_example(example_record(), 5, "[PAD]");
  REQUIRE(ex.generalized_sentences.size() == 5);
  CHECK(ex.generalized_sentences[0] ==
        "The person (born 1935) is a Canadian lawyer and former Senator.");
  CHECK(ex.generalized_sentences[1] ==
        "The person (born date in 1930s) is a Canadian lawyer and former Senator.");
  CHECK(ex.generalized_sentences[2] ==
        "The person (born ***) is a Canadian lawyer and former Senator.");
  CHECK(ex.generalized_sentences[3] ==
        "The person (born [PAD]) is a Canadian lawyer and former Senator.");
  CHECK(ex.generalized_sentences[4] == ex.generalized_sentences[3]);
  CHECK(ex.pad_mask == std::vector<bool>{true, true, true, false, false});
  CHECK(ex.padded_candidates ==
        std::vector<std::string>{"1935", "date in 1930s", "***", "[PAD]", "[PAD]"});
  CHECK(ex.original_text == genlevel::testing::kExampleText);
  CHECK(ex.target_level == 2);
  CHECK(ex.record_id == "example-0");
}

TEST_CASE("candidate count equal to C needs no padding") {
  const auto ex = build_contextual_example(example_record(), 3);
  CHECK(ex.pad_mask == std::vector<bool>{true, true, true});
  for (const auto& s : ex.generalized_sentences) {
    CHECK(s.find("[PAD]") == std::string::npos);
  }
}

TEST_CASE("more candidates than C must be filtered first") {
  CHECK_THROWS_AS(build_contextual_example(example_record(), 2), InvalidArgument);
}

TEST_CASE("span at the start of the text") {
  PiiRecord r;
  r.id = "start";
  r.text = "Zoë Kravitz was born in 1988.";
  r.span_start = 0;
  r.span_end = 11;
  r.span_text = "Zoë Kravitz";
  r.semantic_type = {"PERSON", 5};
  r.candidates = {"an actress", "a person"};
  r.majority_level = 1;
  r.all_levels = {1};
  const auto ex = build_contextual_example(r, 3, "<pad>");
  CHECK(ex.generalized_sentences[0] == "an actress was born in 1988.");
  CHECK(ex.generalized_sentences[2] == "<pad> was born in 1988.");
  CHECK(generalize_text(r, 2) == "a person was born in 1988.");
  CHECK_THROWS_AS(generalize_text(r, 3), InvalidArgument);
}

TEST_CASE("generalized text for the worked example at level 2") {
  CHECK(generalize_text(example_record(), 2) ==
        "The person (born date in 1930s) is a Canadian lawyer and former Senator.");
}

TEST_CASE("contextual JSON matches the committed parity fixture") {
  const auto ds = load_dataset(genlevel::testing::data_dir() / "parity_records.jsonl", Split::kTrain);
  REQUIRE(ds.records.size() == 20);
  std::string out;
  for (const auto& r : ds.records) out += contextual_to_json(build_contextual_example(r, 5)) + "\n";
  CHECK(out == genlevel::testing::read_text(genlevel::testing::data_dir() /
                                            "parity_contextual_c5.jsonl"));
}

TEST_CASE("property: splicing invariants") {
  genlevel::testing::SyntheticOptions opt;
  opt.count = 100;
  opt.min_candidates = 1;
  opt.max_candidates = 7;
  auto records = genlevel::testing::synthetic_records(opt);
  const auto parity =
      load_dataset(genlevel::testing::data_dir() / "parity_records.jsonl", Split::kTrain);
  records.insert(records.end(), parity.records.begin(), parity.records.end());
  for (const auto& r : records) {
    const int c = 7;
    const auto ex = build_contextual_example(r, c);
    CHECK(ex.generalized_sentences.size() == static_cast<std::size_t>(c));
    CHECK(ex.pad_mask.size() == static_cast<std::size_t>(c));
    // Identity substitution reproduces the original.
    CHECK(text::splice_code_points(r.text, r.span_start, r.span_end, r.span_text) == r.text);
    const auto prefix = text::substr_code_points(r.text, 0, r.span_start);
    const auto suffix =
        text::substr_code_points(r.text, r.span_end, text::code_point_length(r.text));
    for (int i = 0; i < c; ++i) {
      const auto& s = ex.generalized_sentences[static_cast<std::size_t>(i)];
      CHECK(ex.pad_mask[static_cast<std::size_t>(i)] == (i < r.num_candidates()));
      CHECK(s.compare(0, prefix.size(), prefix) == 0);
      REQUIRE(s.size() >= suffix.size());
      CHECK(s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0);
      CHECK(s == prefix + ex.padded_candidates[static_cast<std::size_t>(i)] + suffix);
    }
  }
}
