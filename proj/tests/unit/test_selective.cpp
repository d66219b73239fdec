// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"
#include "abstain/selective/calibration.hpp"
#include "abstain/selective/selective.hpp"
#include "abstain/selective/storage.hpp"
#include "abstain/selective/training.hpp"
#include "temp_dir.hpp"

using namespace abstain;
using namespace abstain::selective;
using abstain::testing::TempDir;

namespace {

std::vector<double> random_logits(Rng& rng, std::size_t n, double scale) {
  std::vector<double> out(n);
  for (auto& v : out) v = standard_normal(rng) * scale;
  return out;
}

double mean_entropy(const SelectiveHeads& heads, std::span<const TrainingExample> data) {
  double total = 0.0;
  for (const auto& e : data) total += entropy(heads.score(e.feature).first.probs);
  return total / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("fuse concatenates") {
  const std::vector<double> img = {0, 0}, txt = {0, 0, 0};
  const auto f = fuse(img, txt, "a");
  CHECK(f.x == std::vector<double>(5, 0.0));
  const std::vector<double> a = {1, 2}, b = {3};
  CHECK(fuse(a, b).x == std::vector<double>{1, 2, 3});
  CHECK(fuse(a, b).x == fuse(a, b).x);
  const std::vector<double> bad = {NAN};
  CHECK_THROWS_AS(fuse(bad, b), Error);
}

TEST_CASE("softmax and argmax") {
  const std::vector<double> eq = {0.3, 0.3, 0.3};
  const auto u = softmax(eq);
  for (double p : u.probs) CHECK(p == doctest::Approx(1.0 / 3));
  CHECK(u.argmax() == 0);
  const std::vector<double> peak = {0, 50, 0, 0};
  CHECK(softmax(peak).argmax() == 1);
  const std::vector<double> big = {1000, 999};
  CHECK_NOTHROW(validate(softmax(big)));
  const std::vector<double> inf = {INFINITY, 0};
  CHECK_THROWS_AS(softmax(inf), Error);
  CHECK_THROWS_AS(softmax(std::vector<double>{}), Error);
}

TEST_CASE("softmax is shift invariant") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto l = random_logits(rng, 6, 3.0);
    const double shift = standard_normal(rng) * 100;
    auto shifted = l;
    for (auto& v : shifted) v += shift;
    const auto a = softmax(l), b = softmax(shifted);
    CHECK(a.argmax() == b.argmax());
    for (std::size_t k = 0; k < l.size(); ++k) CHECK(a.probs[k] == doctest::Approx(b.probs[k]));
  }
}

TEST_CASE("binary confidence") {
  FusedFeature f{"x", {2, 9}};
  CHECK(confidence_cls(f, BinaryHead::zeros(2)) == 0.5);
  BinaryHead h{{1, 0}, 0};
  CHECK(confidence_cls(f, h) == doctest::Approx(0.8808).epsilon(1e-4));
  h.bias = 800;
  CHECK(confidence_cls(f, h) == doctest::Approx(1.0));
  CHECK(sigmoid(-800) >= 0.0);
}

TEST_CASE("entropy values and bounds") {
  const std::vector<double> half = {0.5, 0.5};
  CHECK(entropy(half) == doctest::Approx(0.6931).epsilon(1e-4));
  const std::vector<double> one = {0, 1, 0};
  CHECK(entropy(one) == 0.0);
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(std::abs(entropy(uniform_target(n).probs) - std::log(static_cast<double>(n))) < 1e-12);
  }
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto n = 1 + uniform_index(rng, 10);
    const auto d = softmax(random_logits(rng, n, 4.0));
    const double h = entropy(d.probs);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("uniform targets") {
  CHECK(uniform_target(3).probs == std::vector<double>(3, 1.0 / 3));
  CHECK(uniform_target(1).probs == std::vector<double>{1.0});
  CHECK_THROWS_AS(uniform_target(0), Error);
}

TEST_CASE("select examples") {
  const std::vector<double> l = {0, 0, 0, 0};
  const auto uniform = softmax(l);
  CHECK_FALSE(select(uniform, 0.9, {Variant::kCls, 0.5}).abstained());
  CHECK(select(uniform, 0.4, {Variant::kCls, 0.5}).abstained());
  CHECK(select(uniform, entropy(uniform.probs), {Variant::kEnt, std::log(4.0) - 1e-9}).abstained());
  AnswerDistribution onehot;
  onehot.probs = {0, 1, 0, 0};
  onehot.logits = {0, 60, 0, 0};
  const auto out = select(onehot, entropy(onehot.probs), {Variant::kEnt, 0.0});
  REQUIRE(out.answer);
  CHECK(*out.answer == 1);
  CHECK(select(onehot, 60, {Variant::kMaxLogit, 10}).answer == std::optional<std::size_t>(1));
}

TEST_CASE("coverage is monotone in theta") {
  Rng rng(8);
  struct Item {
    AnswerDistribution dist;
    double cls;
  };
  std::vector<Item> items;
  for (int i = 0; i < 1000; ++i) {
    auto d = softmax(random_logits(rng, 1 + uniform_index(rng, 8), 3.0));
    items.push_back({d, uniform_real(rng)});
  }
  for (auto variant : {Variant::kCls, Variant::kEnt, Variant::kMaxLogit}) {
    std::vector<int> coverage;
    for (double theta : linear_grid(-5, 10, 61)) {
      int answered = 0;
      for (const auto& it : items) {
        const double conf = variant == Variant::kCls   ? it.cls
                            : variant == Variant::kEnt ? confidence_ent(it.dist, EntMode::kEntropy)
                                                       : confidence_ent(it.dist, EntMode::kMaxLogit);
        const auto a = select(it.dist, conf, {variant, theta});
        const auto b = select(it.dist, conf, {variant, theta});
        CHECK(a.answer == b.answer);
        answered += !a.abstained();
      }
      coverage.push_back(answered);
    }
    for (std::size_t i = 1; i < coverage.size(); ++i) {
      if (variant == Variant::kEnt) {
        CHECK(coverage[i] >= coverage[i - 1]);
      } else {
        CHECK(coverage[i] <= coverage[i - 1]);
      }
    }
  }
}

TEST_CASE("variant names") {
  for (auto v : {Variant::kCls, Variant::kEnt, Variant::kMaxLogit}) {
    CHECK(variant_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_string("SOFT"), Error);
}

TEST_CASE("calibration") {
  // Max-logit scores: answerable at >= 2.0, unanswerable below.
  std::vector<ScoredExample> val;
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    const bool answerable = i % 2 == 0;
    const double top = answerable ? 2.0 + uniform_real(rng) * 3 : 1.95 - uniform_real(rng) * 3;
    const std::size_t gold = i % 3;
    std::vector<double> logits = {top - 5, top - 5, top - 5};
    logits[gold] = top;
    auto d = softmax(logits);
    val.push_back({d, top, answerable ? std::optional<std::size_t>(gold) : std::nullopt});
  }
  // Pin both edges so 2.0 is the only grid point that separates.
  val[0].confidence = 2.0;
  val[1].confidence = 1.95;
  const auto grid = linear_grid(0, 4, 41);
  const auto cal = calibrate_threshold(val, Variant::kMaxLogit, grid);
  CHECK(std::abs(cal.theta - 2.0) < 1e-12);
  REQUIRE(cal.curve.size() == grid.size());
  double best = 0;
  for (const auto& p : cal.curve) best = std::max(best, p.accuracy);
  CHECK(best == 1.0);

  const std::vector<double> single = {0.7};
  CHECK(calibrate_threshold(val, Variant::kMaxLogit, single).theta == 0.7);
  CHECK_THROWS_AS(calibrate_threshold(val, Variant::kCls, std::vector<double>{}), Error);
  CHECK_THROWS_AS(calibrate_threshold(std::vector<ScoredExample>{}, Variant::kCls, single), Error);
}

TEST_CASE("CLS training separates a 2-D fixture") {
  std::vector<TrainingExample> train;
  Rng rng(12);
  for (int i = 0; i < 80; ++i) {
    const double x0 = (i % 2 ? 1.0 : -1.0) * (0.5 + uniform_real(rng));
    const double x1 = standard_normal(rng);
    const bool answerable = x0 > 0;
    const std::size_t gold = x1 > 0 ? 1 : 0;
    train.push_back({{"e" + std::to_string(i), {x0, x1}},
                     answerable ? std::optional<std::size_t>(gold) : std::nullopt});
  }
  TrainConfig config;
  config.variant = Variant::kCls;
  config.answers = 2;
  config.seed = 1;
  const auto heads = fit_selective(train, config);
  int correct = 0;
  for (const auto& e : train) {
    correct += heads.infer(e.feature, 0.5).abstained() != e.answer.has_value();
  }
  CHECK(correct == static_cast<int>(train.size()));

  const auto again = fit_selective(train, config);
  CHECK(again.classifier.weight == heads.classifier.weight);
  CHECK(again.binary->weight == heads.binary->weight);
}

TEST_CASE("ENT training on unanswerable data approaches uniform") {
  std::vector<TrainingExample> train;
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = standard_normal(rng);
    train.push_back({{"u" + std::to_string(i), x}, std::nullopt});
  }
  TrainConfig config;
  config.variant = Variant::kEnt;
  config.answers = 5;
  config.init_scale = 1.0;
  config.seed = 2;
  TrainConfig untrained = config;
  untrained.epochs = 0;
  const double before = mean_entropy(fit_selective(train, untrained), train);
  const double after = mean_entropy(fit_selective(train, config), train);
  CHECK(std::log(5.0) - before > 0.05);
  CHECK(std::abs(after - std::log(5.0)) < 0.05);
}

TEST_CASE("training rejects bad labels") {
  std::vector<TrainingExample> train = {{{"a", {1.0}}, 3}};
  TrainConfig config;
  config.answers = 2;
  CHECK_THROWS_AS(fit_selective(train, config), Error);
  train = {{{"a", {1.0}}, 0}, {{"b", {1.0, 2.0}}, 1}};
  CHECK_THROWS_AS(fit_selective(train, config), Error);
}

TEST_CASE("feature, label and head storage round trip") {
  TempDir dir;
  std::vector<FusedFeature> feats = {{"a", {0.5, -1.25, 3}}, {"b", {0, 0, 1}}};
  save_features(dir / "f.bin", feats);
  CHECK(std::filesystem::file_size(dir / "f.bin") == 6 * 4);
  const auto loaded = load_features(dir / "f.bin");
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "a");
  CHECK(loaded[0].x == feats[0].x);

  std::map<std::string, std::optional<std::size_t>> labels = {{"a", 1}, {"b", std::nullopt}};
  save_labels(dir / "l.jsonl", labels);
  CHECK(load_labels(dir / "l.jsonl") == labels);
  const auto joined = join_labels(loaded, labels);
  CHECK(joined[1].answer == std::nullopt);
  CHECK_THROWS_AS(join_labels(loaded, {{"a", 1}}), Error);

  std::vector<TrainingExample> train = {{feats[0], 1}, {feats[1], std::nullopt}};
  for (auto v : {Variant::kCls, Variant::kEnt, Variant::kMaxLogit}) {
    TrainConfig config;
    config.variant = v;
    config.answers = 3;
    config.epochs = 5;
    const auto heads = fit_selective(train, config);
    save_heads(dir / "h.json", heads);
    const auto back = load_heads(dir / "h.json");
    CHECK(back.variant == v);
    CHECK(back.classifier.weight == heads.classifier.weight);
    CHECK(back.classifier.bias == heads.classifier.bias);
    CHECK(back.binary.has_value() == heads.binary.has_value());
    if (heads.binary) CHECK(back.binary->weight == heads.binary->weight);
  }
}
