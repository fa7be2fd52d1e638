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
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "genlevel/core/error.hpp"
#include "genlevel/core/eval.hpp"
#include "genlevel/core/random.hpp"
#include "json.hpp"

using namespace genlevel;

namespace {

PiiRecord rec(int majority, std::vector<int> all, int m = 5) {
  PiiRecord r = genlevel::testing::example_record();
  r.candidates.clear();
  for (int i = 0; i < m; ++i) r.candidates.push_back("c" + std::to_string(i));
  r.majority_level = majority;
  r.all_levels = std::move(all);
  return r;
}

}  // namespace

TEST_CASE("majority-vote accuracy counts exact matches") {
  const std::vector<PiiRecord> rs = {rec(1, {1}), rec(2, {2}), rec(3, {3}), rec(1, {1})};
  const std::vector<int> preds = {1, 2, 3, 2};
  const auto ev = evaluate(preds, rs);
  CHECK(ev.n == 4);
  CHECK(ev.majority_vote_acc == 0.75);
  CHECK(ev.all_selections_acc == 0.75);
}

TEST_CASE("a non-majority annotator level counts for all-selections only") {
  const std::vector<PiiRecord> rs = {rec(3, {1, 3})};
  const std::vector<int> preds = {1};
  const auto ev = evaluate(preds, rs);
  CHECK(ev.majority_vote_acc == 0.0);
  CHECK(ev.all_selections_acc == 1.0);
}

TEST_CASE("perfect predictions") {
  const std::vector<PiiRecord> rs = {rec(1, {1}), rec(2, {2}), rec(2, {2}), rec(3, {3})};
  const std::vector<int> preds = {1, 2, 2, 3};
  const auto ev = evaluate(preds, rs, 3);
  CHECK(ev.majority_vote_acc == 1.0);
  CHECK(ev.all_selections_acc == 1.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(ev.confusion.normalized[i][j] == (i == j ? 1.0 : 0.0));
    }
  }
  CHECK(ev.confusion.counts[1][1] == 2);
  CHECK(ev.weighted_support.f1 == 1.0);
}

TEST_CASE("weighted scores: literal and support modes") {
  std::vector<LevelScores> ls(2);
  ls[0].level = 1;
  ls[0].precision = ls[0].recall = ls[0].f1 = 0.8;
  ls[0].support = 4;
  ls[1].level = 2;
  ls[1].precision = ls[1].recall = ls[1].f1 = 0.5;
  ls[1].support = 2;
  const auto lit = weighted_scores(ls, WeightingMode::kLiteral);
  const auto sup = weighted_scores(ls, WeightingMode::kSupport);
  CHECK(lit.f1 == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(sup.f1 == doctest::Approx(0.70).epsilon(1e-15));
  CHECK(lit.precision == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(sup.recall == doctest::Approx(0.70).epsilon(1e-15));

  const std::vector<LevelScores> one(ls.begin(), ls.begin() + 1);
  CHECK(weighted_scores(one, WeightingMode::kLiteral).f1 == doctest::Approx(0.2));
  CHECK(weighted_scores(one, WeightingMode::kSupport).f1 == 0.8);

  auto same = ls;
  for (auto& s : same) s.precision = s.recall = s.f1 = 0.37;
  CHECK(weighted_scores(same, WeightingMode::kSupport).f1 == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("zero-support levels are excluded and reported") {
  std::vector<LevelScores> ls(3);
  for (int i = 0; i < 3; ++i) ls[static_cast<std::size_t>(i)].level = i + 1;
  ls[0].support = 2;
  ls[0].f1 = 1.0;
  ls[2].support = 2;
  ls[2].f1 = 0.5;
  const auto w = weighted_scores(ls, WeightingMode::kLiteral);
  CHECK(w.excluded_levels == std::vector<int>{2});
  CHECK(w.f1 == doctest::Approx(0.75));
}

TEST_CASE("confusion matrix: all predicted level 1") {
  const std::vector<int> truth = {1, 2, 3, 3};
  const std::vector<int> preds = {1, 1, 1, 1};
  const auto cm = confusion_matrix(preds, truth, 3);
  CHECK(cm.normalized[0][0] == 1.0);
  CHECK(cm.normalized[1][0] == 1.0);
  CHECK(cm.normalized[2][0] == 1.0);
  CHECK(cm.normalized[1][1] == 0.0);
  CHECK(cm.normalized[2][2] == 0.0);
}

TEST_CASE("confusion matrix: half of level 2 recovered") {
  const std::vector<int> truth = {2, 2, 1};
  const std::vector<int> preds = {2, 1, 1};
  const auto cm = confusion_matrix(preds, truth, 3);
  CHECK(cm.normalized[1][1] == 0.5);
  CHECK(cm.counts[1][0] == 1);
  CHECK(cm.normalized[2] == std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{4}, std::vector<int>{1}, 3), InvalidArgument);
}

TEST_CASE("per-level precision is zero when a level is never predicted") {
  const std::vector<PiiRecord> rs = {rec(1, {1}), rec(2, {2})};
  const std::vector<int> preds = {1, 1};
  const auto ev = evaluate(preds, rs, 2);
  REQUIRE(ev.per_level.size() == 2);
  CHECK(ev.per_level[1].precision == 0.0);
  CHECK(ev.per_level[1].recall == 0.0);
  CHECK(ev.per_level[1].f1 == 0.0);
  CHECK(ev.per_level[0].precision == 0.5);
  CHECK(ev.per_level[0].recall == 1.0);
  CHECK(ev.per_level[0].f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("evaluation input errors") {
  const std::vector<PiiRecord> rs = {rec(1, {1})};
  CHECK_THROWS_AS(evaluate(std::vector<int>{1, 2}, rs), InvalidArgument);
  CHECK_THROWS_AS(evaluate(std::vector<int>{0}, rs), InvalidArgument);
  const auto empty = evaluate({}, {});
  CHECK(empty.n == 0);
}

TEST_CASE("property: metrics are invariant to record order") {
  Rng rng(31);
  std::vector<PiiRecord> rs;
  std::vector<int> preds;
  for (int i = 0; i < 60; ++i) {
    const int m = 1 + static_cast<int>(rng.below(5));
    const int maj = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m)));
    rs.push_back(rec(maj, {maj}, m));
    preds.push_back(1 + static_cast<int>(rng.below(static_cast<std::size_t>(m))));
  }
  const auto base = eval_to_json(evaluate(preds, rs, 5));
  std::vector<std::size_t> order(rs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int t = 0; t < 5; ++t) {
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<PiiRecord> r2;
    std::vector<int> p2;
    for (auto i : order) {
      r2.push_back(rs[i]);
      p2.push_back(preds[i]);
    }
    const auto a = nlohmann::json::parse(base);
    const auto b = nlohmann::json::parse(eval_to_json(evaluate(p2, r2, 5)));
    CHECK(a["majority_vote_acc"] == b["majority_vote_acc"]);
    CHECK(a["confusion"] == b["confusion"]);
    CHECK(a["per_level"] == b["per_level"]);
    for (const char* k : {"weighted_support", "weighted_literal"}) {
      for (const char* f : {"precision", "recall", "f1"}) {
        CHECK(a[k][f].get<double>() == doctest::Approx(b[k][f].get<double>()).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("reports in every format") {
  const std::vector<PiiRecord> rs = {rec(1, {1}), rec(2, {2, 3}), rec(3, {3})};
  const std::vector<int> preds = {1, 3, 3};
  const auto ev = evaluate(preds, rs, 3);
  const auto j = nlohmann::json::parse(eval_to_json(ev));
  CHECK(j["n"] == 3);
  CHECK(j.contains("weighted_literal"));
  CHECK(j.contains("weighted_support"));
  const auto text = eval_to_text(ev);
  CHECK(text.find("majority vote") != std::string::npos);
  CHECK(confusion_counts_csv(ev.confusion) ==
        "true\\pred,1,2,3\n1,1,0,0\n2,0,0,1\n3,0,0,1\n");
  CHECK(confusion_normalized_csv(ev.confusion).find("2,0.000000,0.000000,1.000000") != std::string::npos);
}
