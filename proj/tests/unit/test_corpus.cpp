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

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "genlevel/core/corpus.hpp"
#include "genlevel/core/error.hpp"
#include "genlevel/core/random.hpp"
#include "json.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace genlevel;
using genlevel::testing::example_record;

namespace {

std::vector<std::string> captured;
void capture(const std::string& m) { captured.push_back(m); }

struct WarningCapture {
  WarningCapture() {
    captured.clear();
    set_warning_sink(&capture);
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

nlohmann::json example_json() { return nlohmann::json::parse(serialize_record(example_record())); }

}  // namespace

TEST_CASE("the worked example loads with three candidates") {
  const auto ds = load_dataset(genlevel::testing::data_dir() / "example_record.jsonl", Split::kTrain);
  REQUIRE(ds.records.size() == 1);
  const auto& r = ds.records[0];
  CHECK(r.num_candidates() == 3);
  CHECK(r.majority_level == 2);
  CHECK(r.span_text == "August 22, 1935");
  CHECK(r.semantic_type.label == "DATETIME");
  CHECK(r == example_record());
}

TEST_CASE("majority level beyond the candidate list is a validation error") {
  auto j = example_json();
  j["majority_level"] = 4;
  j["all_levels"] = {4};
  SemanticTypeRegistry types;
  CHECK_THROWS_AS(parse_record(j.dump(), types), ValidationError);
}

TEST_CASE("record validation") {
  SemanticTypeRegistry types;
  auto parse = [&](const nlohmann::json& j) { return parse_record(j.dump(), types); };

  SUBCASE("span text must match the offsets") {
    auto j = example_json();
    j["span_text"] = "August 22 1935";
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("offsets are code points") {
    nlohmann::json j = {{"id", "u"},           {"text", "Zoë Kravitz was born."},
                        {"span_start", 0},     {"span_end", 11},
                        {"span_text", "Zoë Kravitz"}, {"semantic_type", "PERSON"},
                        {"candidates", {"a person"}}, {"majority_level", 1},
                        {"all_levels", {1}}};
    CHECK(parse(j).span_text == "Zoë Kravitz");
    j["span_end"] = 12;
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("empty candidate list") {
    auto j = example_json();
    j["candidates"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("majority must be among all_levels") {
    auto j = example_json();
    j["all_levels"] = {3};
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("level zero") {
    auto j = example_json();
    j["all_levels"] = {0, 2};
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("pad token may not be a candidate") {
    auto j = example_json();
    j["candidates"] = {"1935", "[PAD]", "***"};
    CHECK_THROWS_AS(parse(j), ValidationError);
  }
  SUBCASE("missing field") {
    auto j = example_json();
    j.erase("span_end");
    CHECK_THROWS_AS(parse(j), ParseError);
  }
  SUBCASE("not JSON") { CHECK_THROWS_AS(parse_record("{nope", types), ParseError); }
}

TEST_CASE("empty file gives an empty dataset") {
  genlevel::testing::TempDir dir;
  genlevel::testing::write_text(dir / "empty.jsonl", "");
  const auto ds = load_dataset(dir / "empty.jsonl", Split::kTest);
  CHECK(ds.records.empty());
  CHECK(ds.split == Split::kTest);
  CHECK(parse_dataset("\n\n", Split::kTrain).records.empty());
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/genlevel.jsonl", Split::kTrain), IoError);
}

TEST_CASE("dataset errors name the line") {
  const std::string good = serialize_record(example_record());
  try {
    parse_dataset(good + "\n" + good + "\n", Split::kTrain);
    FAIL("duplicate id accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_dataset(good + "\n\n{bad\n", Split::kTrain);
    FAIL("bad line accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("semantic types: known labels keep codes, unknown ones are appended with a warning") {
  WarningCapture warnings;
  SemanticTypeRegistry types;
  const auto n = types.size();
  const auto dt = types.resolve("DATETIME");
  CHECK(dt.code == *types.find("DATETIME"));
  CHECK(captured.empty());
  const auto code = types.resolve("VEHICLE");
  CHECK(code.code == static_cast<int>(n));
  CHECK(types.size() == n + 1);
  CHECK(captured.size() == 1);
  CHECK(types.resolve("VEHICLE").code == static_cast<int>(n));
  CHECK(captured.size() == 1);
  const auto labels = SemanticTypeRegistry::default_labels();
  CHECK(std::is_sorted(labels.begin(), labels.end()));
}

TEST_CASE("filtering by candidate cap") {
  const auto r = example_record();
  const std::vector<PiiRecord> one = {r};
  CHECK(filter_by_max_candidates(one, 2).empty());
  CHECK(filter_by_max_candidates(one, 3).size() == 1);
  CHECK(filter_by_max_candidates(one, 5).size() == 1);
  CHECK_THROWS_AS(filter_by_max_candidates(one, 0), InvalidArgument);
}

TEST_CASE("stats: coverage and histograms") {
  auto a = example_record();
  auto b = example_record();
  b.id = "single";
  b.candidates = {"1935"};
  b.majority_level = 1;
  b.all_levels = {1};
  const std::vector<PiiRecord> rs = {b, a};
  const std::vector<int> cs = {2};
  const auto s = compute_stats(rs, cs);
  CHECK(s.record_count == 2);
  CHECK(s.coverage_at.at(2) == 0.5);
  CHECK(s.histogram_num_candidates.at(1) == 1);
  CHECK(s.histogram_num_candidates.at(3) == 1);
  CHECK(s.histogram_selected_level.at(1) == 1);
  CHECK(s.histogram_selected_level.at(2) == 1);

  const auto empty = compute_stats({}, cs);
  CHECK(empty.record_count == 0);
  CHECK(empty.histogram_num_candidates.empty());
  CHECK(empty.coverage_at.at(2) == 0.0);
  CHECK(nlohmann::json::parse(stats_to_json(s))["record_count"] == 2);
}

TEST_CASE("property: serialize and reload round-trips") {
  genlevel::testing::SyntheticOptions opt;
  opt.count = 40;
  opt.min_candidates = 1;
  opt.max_candidates = 7;
  auto records = genlevel::testing::synthetic_records(opt);
  records.push_back(example_record());
  std::string text;
  for (const auto& r : records) text += serialize_record(r) + "\n";
  const auto ds = parse_dataset(text, Split::kTrain);
  REQUIRE(ds.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(ds.records[i].id == records[i].id);
    CHECK(ds.records[i].text == records[i].text);
    CHECK(ds.records[i].candidates == records[i].candidates);
    CHECK(ds.records[i].all_levels == records[i].all_levels);
    CHECK(ds.records[i].semantic_type.label == records[i].semantic_type.label);
    CHECK(serialize_record(ds.records[i]) == serialize_record(records[i]));
  }

  genlevel::testing::TempDir dir;
  save_dataset(dir / "out.jsonl", ds.records);
  const auto again = load_dataset(dir / "out.jsonl", Split::kTrain);
  CHECK(again.records == ds.records);
}

TEST_CASE("property: filtering is idempotent and monotone in C") {
  genlevel::testing::SyntheticOptions opt;
  opt.count = 200;
  opt.min_candidates = 1;
  opt.max_candidates = 9;
  const auto records = genlevel::testing::synthetic_records(opt);
  for (int c1 = 1; c1 <= 10; ++c1) {
    const auto f1 = filter_by_max_candidates(records, c1);
    CHECK(filter_by_max_candidates(f1, c1) == f1);
    for (const auto& r : f1) CHECK(r.num_candidates() <= c1);
    for (int c2 = c1; c2 <= 10; ++c2) {
      const auto f2 = filter_by_max_candidates(records, c2);
      for (const auto& r : f1) {
        CHECK(std::find(f2.begin(), f2.end(), r) != f2.end());
      }
    }
  }
}
