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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "genlevel/core/context_model.hpp"
#include "genlevel/core/parallel.hpp"
#include "genlevel/core/contextual.hpp"
#include "genlevel/core/encoder.hpp"
#include "genlevel/core/error.hpp"
#include "genlevel/core/random.hpp"
#include "gradcheck.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace genlevel;

namespace {

EncodedExample two_slot_example(int target) {
  EncodedExample ex;
  ex.original = {1.0, 0.0};
  ex.candidates = {{0.0, 1.0}, {1.0, 0.0}};
  ex.mask = {true, true};
  ex.target_level = target;
  ex.all_levels = {target};
  return ex;
}

std::vector<double> softmax_oracle(const std::vector<double>& logits) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double l : logits) mx = std::max(mx, l);
  std::vector<double> p(logits.size());
  double z = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - mx));
  for (double& x : p) x /= z;
  return p;
}

ContextModelConfig overfit_config(int epochs) {
  auto cfg = ContextModelConfig::defaults_for("hashed");
  cfg.validation = ValidationMode::kNone;
  cfg.max_epochs = epochs;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("forward: two-dimensional worked case") {
  const auto p = TransformParams::identity(2);
  const auto ex = two_slot_example(2);
  const auto pred = forward(p, ex.original, ex.candidates, ex.mask, -1);
  CHECK(pred.scores == std::vector<double>{1.0, 0.0});
  CHECK(pred.masked_logits == std::vector<double>{-1.0, 0.0});
  CHECK(pred.predicted_level == 2);
  const double e = std::exp(-1.0);
  CHECK(pred.probabilities[0] == doctest::Approx(e / (1 + e)).epsilon(1e-15));
  CHECK(pred.probabilities[1] == doctest::Approx(1 / (1 + e)).epsilon(1e-15));

  const auto flipped = forward(p, ex.original, ex.candidates, ex.mask, +1);
  CHECK(flipped.predicted_level == 1);
}

TEST_CASE("forward: a single real candidate takes all the mass") {
  const auto p = TransformParams::identity(2);
  const std::vector<Embedding> cands = {{0.3, 0.1}, {0.0, 0.0}};
  const auto pred = forward(p, {1.0, 0.0}, cands, {true, false}, -1);
  CHECK(pred.probabilities == std::vector<double>{1.0, 0.0});
  CHECK(pred.predicted_level == 1);
  CHECK(pred.scores[1] == 0.0);
  CHECK(std::isinf(pred.masked_logits[1]));
  CHECK(pred.masked_logits[1] < 0);
}

TEST_CASE("forward: input errors") {
  const auto p = TransformParams::identity(2);
  const std::vector<Embedding> cands = {{0.0, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(forward(p, {1.0, 0.0}, cands, {false, false}, -1), InvalidArgument);
  CHECK_THROWS_AS(forward(p, {1.0, 0.0, 3.0}, cands, {true, true}, -1), InvalidArgument);
  CHECK_THROWS_AS(forward(p, {1.0, 0.0}, cands, {true}, -1), InvalidArgument);
  const std::vector<Embedding> bad = {{std::nan(""), 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(forward(p, {1.0, 0.0}, bad, {true, true}, -1), NumericError);
  auto inf_params = p;
  inf_params.w0[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward(inf_params, {1.0, 0.0}, cands, {true, true}, -1), NumericError);
}

TEST_CASE("ties go to the lowest level") {
  const auto rec = [] {
    auto r = genlevel::testing::example_record();
    r.candidates = {"date in 1930s", "date in 1930s", "***"};
    return r;
  }();
  HashedEmbedder emb(64);
  ContextModelConfig cfg;
  cfg.max_candidates = 5;
  const auto pred = predict_context(TransformParams::identity(64), rec, emb, cfg);
  CHECK(pred.probabilities[0] == pred.probabilities[1]);
  CHECK(pred.predicted_level != 2);
  if (pred.probabilities[0] >= pred.probabilities[2]) CHECK(pred.predicted_level == 1);

  const std::vector<Embedding> same = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  CHECK(forward(TransformParams::identity(2), {1.0, 0.0}, same, {true, true, true}, -1)
            .predicted_level == 1);
}

TEST_CASE("loss on the worked case") {
  const auto p = TransformParams::identity(2);
  const std::vector<EncodedExample> to_two = {two_slot_example(2)};
  const std::vector<EncodedExample> to_one = {two_slot_example(1)};
  const double want_two = -std::log(1.0 / (std::exp(-1.0) + 1.0));
  CHECK(loss_and_grad(p, to_two, -1).loss == doctest::Approx(want_two).epsilon(1e-14));
  CHECK(loss_and_grad(p, to_two, -1).loss == doctest::Approx(0.3133).epsilon(1e-4));
  CHECK(loss_and_grad(p, to_one, -1).loss == doctest::Approx(1.3133).epsilon(1e-4));
  CHECK(loss_and_grad(p, to_one, -1).loss - loss_and_grad(p, to_two, -1).loss ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("loss: target on a padded slot is rejected") {
  auto ex = two_slot_example(2);
  ex.mask = {true, false};
  const std::vector<EncodedExample> batch = {ex};
  CHECK_THROWS_AS(loss_and_grad(TransformParams::identity(2), batch, -1), InvalidArgument);
  CHECK_THROWS_AS(loss_and_grad(TransformParams::identity(2), {}, -1), InvalidArgument);
}

TEST_CASE("gradients match central differences") {
  Rng rng(2024);
  for (int t = 0; t < 10; ++t) {
    const auto inst = genlevel::testing::random_instance(rng, 8, 3, 3);
    CHECK(genlevel::testing::max_gradient_error(inst, -1) < 1e-4);
    CHECK(genlevel::testing::max_gradient_error(inst, +1) < 1e-4);
  }
}

TEST_CASE("padded slots contribute no gradient") {
  Rng rng(9);
  auto inst = genlevel::testing::random_instance(rng, 6, 4, 1);
  auto& ex = inst.batch[0];
  ex.mask = {true, true, false, false};
  ex.target_level = 1;
  const auto base = loss_and_grad(inst.params, inst.batch, -1);
  for (auto& x : ex.candidates[2]) x *= 7.0;
  for (auto& x : ex.candidates[3]) x = -x;
  const auto moved = loss_and_grad(inst.params, inst.batch, -1);
  CHECK(moved.loss == base.loss);
  CHECK(moved.grad == base.grad);
}

TEST_CASE("property: scores are non-negative and vanish for identical sentences") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    auto inst = genlevel::testing::random_instance(rng, 8, 4, 1);
    auto p = inst.params;
    p.w1 = p.w0;
    p.b1 = p.b0;
    auto& ex = inst.batch[0];
    ex.candidates[0] = ex.original;
    const auto pred = forward(p, ex.original, ex.candidates, ex.mask, -1);
    CHECK(pred.scores[0] == 0.0);
    for (double s : pred.scores) CHECK(s >= 0.0);
  }
}

TEST_CASE("property: probabilities are the softmax of the logits, invariant to shifts") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto inst = genlevel::testing::random_instance(rng, 5, 5, 1);
    const auto& ex = inst.batch[0];
    const auto pred = forward(inst.params, ex.original, ex.candidates, ex.mask, -1);
    const double shift = rng.uniform(-50, 50);
    std::vector<double> shifted = pred.masked_logits;
    for (double& l : shifted) l += shift;
    const auto oracle = softmax_oracle(shifted);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(pred.probabilities[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
    const auto best = std::max_element(oracle.begin(), oracle.end()) - oracle.begin();
    CHECK(pred.predicted_level == best + 1);
  }
}

TEST_CASE("AdamW first step matches the closed form") {
  const double lr = 0.01, wd = 0.1, eps = 1e-8;
  AdamW opt(2, lr, wd, 0.9, 0.999, eps);
  TransformParams p = TransformParams::identity(2);
  TransformParams g = TransformParams::zeros(2);
  g.w0 = {0.5, -2.0};
  g.b1 = {1e-3, 0.0};
  opt.step(p, g);
  CHECK(opt.steps() == 1);
  // After bias correction the first moment is g and the second is g^2.
  CHECK(p.w0[0] == doctest::Approx(1.0 - lr * wd - lr * 0.5 / (0.5 + eps)).epsilon(1e-15));
  CHECK(p.w0[1] == doctest::Approx(1.0 - lr * wd + lr * 2.0 / (2.0 + eps)).epsilon(1e-15));
  CHECK(p.w1[0] == doctest::Approx(1.0 - lr * wd).epsilon(1e-15));
  CHECK(p.b1[0] == doctest::Approx(-lr * 1e-3 / (1e-3 + eps)).epsilon(1e-12));
  CHECK(p.b0[0] == 0.0);
}

TEST_CASE("AdamW second step follows the moment recursions") {
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  AdamW opt(1, lr, 0.0, b1, b2, eps);
  TransformParams p = TransformParams::zeros(1);
  TransformParams g = TransformParams::zeros(1);
  g.w0 = {1.0};
  opt.step(p, g);
  g.w0 = {-3.0};
  opt.step(p, g);
  const double m = b1 * (1 - b1) * 1.0 + (1 - b1) * -3.0;
  const double v = b2 * (1 - b2) * 1.0 + (1 - b2) * 9.0;
  const double mhat = m / (1 - b1 * b1);
  const double vhat = v / (1 - b2 * b2);
  const double want = -lr * 1.0 / (1.0 + eps) - lr * mhat / (std::sqrt(vhat) + eps);
  CHECK(p.w0[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("zero epochs return the identity") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(64);
  const auto r = train_context_model(records, emb, overfit_config(0));
  CHECK(r.params == TransformParams::identity(64));
}

TEST_CASE("empty training set is an error") {
  HashedEmbedder emb(8);
  CHECK_THROWS_AS(train_context_model({}, emb, overfit_config(1)), InvalidArgument);
}

TEST_CASE("training is reproducible for a seed") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(96);
  auto cfg = overfit_config(5);
  const auto a = train_context_model(records, emb, cfg);
  const auto b = train_context_model(records, emb, cfg);
  CHECK(a.params == b.params);
  CHECK(training_log_to_json(a.log) == training_log_to_json(b.log));
  cfg.seed = 4;
  const auto c = train_context_model(records, emb, cfg);
  CHECK(c.params != a.params);
}

TEST_CASE("thread count does not change the result") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(96);
  auto cfg = overfit_config(3);
  cfg.validation = ValidationMode::kLeaveOneOut;
  set_thread_count(1);
  const auto one = train_context_model(records, emb, cfg);
  set_thread_count(4);
  const auto four = train_context_model(records, emb, cfg);
  set_thread_count(0);
  CHECK(one.params == four.params);
  CHECK(training_log_to_json(one.log) == training_log_to_json(four.log));
}

TEST_CASE("loss decreases over the first epoch on the separable set") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(768);
  const auto cfg = overfit_config(1);
  const auto encoded = encode_records(records, emb, cfg);
  const double before = loss_and_grad(TransformParams::identity(768), encoded, -1).loss;
  const auto r = train_encoded(encoded, 768, cfg);
  const double after = loss_and_grad(r.params, encoded, -1).loss;
  CHECK(after < before);
}

TEST_CASE("overfit run memorizes its training records") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(768);
  const auto cfg = overfit_config(60);
  const auto r = train_context_model(records, emb, cfg);
  int correct = 0;
  for (const auto& rec : records) {
    const auto pred = predict_context(r.params, rec, emb, cfg);
    correct += pred.predicted_level == rec.majority_level;
  }
  CHECK(correct >= 48);

  auto example_cfg = cfg;
  example_cfg.max_candidates = 5;
  const auto pred = predict_context(r.params, genlevel::testing::example_record(), emb, example_cfg);
  CHECK(pred.predicted_level >= 1);
  CHECK(pred.predicted_level <= 3);
  CHECK(pred.probabilities[3] == 0.0);
  CHECK(pred.probabilities[4] == 0.0);
}

TEST_CASE("holdout validation logs epoch 0 and keeps the best epoch") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(128);
  auto cfg = overfit_config(15);
  cfg.validation = ValidationMode::kHoldout;
  const auto r = train_context_model(records, emb, cfg);
  CHECK(r.log.validation == "holdout");
  CHECK(r.log.validation_size == 5);
  CHECK(r.log.train_size == 45);
  REQUIRE(!r.log.epochs.empty());
  CHECK(r.log.epochs.front().epoch == 0);
  double best = -1;
  int best_epoch = -1;
  for (const auto& e : r.log.epochs) {
    CHECK(e.validation_accuracy >= 0.0);
    if (e.validation_accuracy > best) {
      best = e.validation_accuracy;
      best_epoch = e.epoch;
    }
  }
  CHECK(r.log.best_epoch == best_epoch);
}

TEST_CASE("early stopping honours patience") {
  const auto records = genlevel::testing::separable_records();
  HashedEmbedder emb(128);
  auto cfg = overfit_config(200);
  cfg.validation = ValidationMode::kHoldout;
  cfg.early_stop_patience = 2;
  const auto r = train_context_model(records, emb, cfg);
  CHECK(r.log.epochs.back().epoch <= r.log.best_epoch + 2);
  if (r.log.epochs.back().epoch < 200) CHECK(r.log.stopped_early);
}

TEST_CASE("leave-one-out picks an epoch and refits on all records") {
  auto records = genlevel::testing::separable_records();
  records.resize(12);
  HashedEmbedder emb(64);
  auto cfg = overfit_config(6);
  cfg.validation = ValidationMode::kLeaveOneOut;
  const auto r = train_context_model(records, emb, cfg);
  CHECK(r.log.validation == "leave-one-out");
  CHECK(r.log.validation_size == 12);
  CHECK(r.log.best_epoch >= 0);
  CHECK(r.log.best_epoch <= 6);
  auto plain = overfit_config(r.log.best_epoch);
  plain.seed = cfg.seed;
  CHECK(train_context_model(records, emb, plain).params == r.params);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Rng rng(8);
  auto p = genlevel::testing::random_instance(rng, 16, 2, 1).params;
  p.w0[3] = 1e-300;
  p.b1[0] = -0.1;
  genlevel::testing::TempDir dir;
  save_checkpoint(dir / "ckpt.json", p, 7, -1);
  const auto c = load_checkpoint(dir / "ckpt.json");
  CHECK(c.params == p);
  CHECK(c.max_candidates == 7);
  CHECK(c.logit_sign == -1);
  CHECK(checkpoint_to_json(c.params, 7, -1) == genlevel::testing::read_text(dir / "ckpt.json"));
}

TEST_CASE("malformed checkpoints are rejected") {
  CHECK_THROWS_AS(checkpoint_from_json("{"), ParseError);
  CHECK_THROWS_AS(checkpoint_from_json(R"({"version":2})"), ParseError);
  CHECK_THROWS_AS(
      checkpoint_from_json(
          R"({"version":1,"V":2,"C":3,"logit_sign":-1,"W0":[1],"b0":[0,0],"W1":[1,1],"b1":[0,0]})"),
      Error);
  CHECK_THROWS_AS(
      checkpoint_from_json(
          R"({"version":1,"V":1,"C":3,"logit_sign":0,"W0":[1],"b0":[0],"W1":[1],"b1":[0]})"),
      ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), IoError);
}
