// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/selective/training.hpp"

#include <cmath>
#include <numeric>

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"

namespace abstain::selective {

std::pair<AnswerDistribution, double> SelectiveHeads::score(const FusedFeature& feature) const {
  auto dist = predict_answer(feature, classifier);
  switch (variant) {
    case Variant::kCls:
      if (!binary) throw Error("CLS heads without a binary head");
      return {std::move(dist), confidence_cls(feature, *binary)};
    case Variant::kEnt: {
      const double h = confidence_ent(dist, EntMode::kEntropy);
      return {std::move(dist), h};
    }
    case Variant::kMaxLogit: {
      const double m = confidence_ent(dist, EntMode::kMaxLogit);
      return {std::move(dist), m};
    }
  }
  throw Error("unknown variant");
}

SelectiveOutput SelectiveHeads::infer(const FusedFeature& feature, double theta) const {
  const auto [dist, confidence] = score(feature);
  return select(dist, confidence, {variant, theta});
}

namespace {

void gaussian_fill(std::vector<double>& values, double scale, Rng& rng) {
  for (double& v : values) v = scale * standard_normal(rng);
}

// One SGD step of softmax cross-entropy against `target`.
void classifier_step(ClassifierHead& head, std::span<const double> x,
                     std::span<const double> target, double lr, double l2) {
  const auto dist = softmax(head.logits(x));
  for (std::size_t a = 0; a < head.answers; ++a) {
    const double g = dist.probs[a] - target[a];
    double* row = head.weight.data() + a * head.dims;
    for (std::size_t d = 0; d < head.dims; ++d) row[d] -= lr * (g * x[d] + l2 * row[d]);
    head.bias[a] -= lr * g;
  }
}

void binary_step(BinaryHead& head, std::span<const double> x, double label, double lr,
                 double l2) {
  const double g = sigmoid(head.logit(x)) - label;
  for (std::size_t d = 0; d < x.size(); ++d) {
    head.weight[d] -= lr * (g * x[d] + l2 * head.weight[d]);
  }
  head.bias -= lr * g;
}

}  // namespace

SelectiveHeads fit_selective(std::span<const TrainingExample> train, const TrainConfig& config) {
  if (train.empty()) throw Error("fit_selective: empty training set");
  if (config.answers == 0) throw Error("fit_selective: answer set size must be positive");
  if (!(config.learning_rate > 0) || config.epochs < 0) {
    throw Error("fit_selective: learning rate must be positive and epochs non-negative");
  }
  const std::size_t dims = train.front().feature.x.size();
  for (const auto& ex : train) {
    if (ex.feature.x.size() != dims) {
      throw Error("fit_selective: feature '" + ex.feature.id + "' has " +
                  std::to_string(ex.feature.x.size()) + " dims, expected " + std::to_string(dims));
    }
    if (ex.answer && *ex.answer >= config.answers) {
      throw Error("fit_selective: label " + std::to_string(*ex.answer) + " of '" + ex.feature.id +
                  "' outside the answer set");
    }
  }

  Rng rng(config.seed);
  SelectiveHeads heads;
  heads.variant = config.variant;
  heads.classifier = ClassifierHead::zeros(config.answers, dims);
  gaussian_fill(heads.classifier.weight, config.init_scale, rng);
  if (config.variant == Variant::kCls) {
    heads.binary = BinaryHead::zeros(dims);
    gaussian_fill(heads.binary->weight, config.init_scale, rng);
  }

  const auto uniform = uniform_target(config.answers).probs;
  std::vector<double> one_hot(config.answers, 0.0);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      const auto& ex = train[i];
      if (ex.answer) {
        std::fill(one_hot.begin(), one_hot.end(), 0.0);
        one_hot[*ex.answer] = 1.0;
      }
      if (config.variant == Variant::kCls) {
        binary_step(*heads.binary, ex.feature.x, ex.answer ? 1.0 : 0.0, config.learning_rate,
                    config.l2);
        if (ex.answer) {
          classifier_step(heads.classifier, ex.feature.x, one_hot, config.learning_rate, config.l2);
        }
      } else {
        classifier_step(heads.classifier, ex.feature.x, ex.answer ? one_hot : uniform,
                        config.learning_rate, config.l2);
      }
    }
  }
  return heads;
}

}  // namespace abstain::selective
