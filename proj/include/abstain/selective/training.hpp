// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abstain/selective/selective.hpp"

namespace abstain::selective {

/// One labelled feature; an empty answer marks an unanswerable instance.
struct TrainingExample {
  FusedFeature feature;
  std::optional<std::size_t> answer;
};

struct TrainConfig {
  Variant variant = Variant::kCls;
  std::size_t answers = 0;  // |A|
  double learning_rate = 0.1;
  int epochs = 200;
  double init_scale = 0.01;  // stddev of the Gaussian initialisation
  double l2 = 0.0;
  std::uint64_t seed = 0;
};

struct SelectiveHeads {
  Variant variant = Variant::kCls;
  ClassifierHead classifier;
  std::optional<BinaryHead> binary;  // present for CLS

  /// Distribution plus the variant's selection score for one feature.
  std::pair<AnswerDistribution, double> score(const FusedFeature& feature) const;
  SelectiveOutput infer(const FusedFeature& feature, double theta) const;
};

/// Plain per-example SGD, examples reshuffled each epoch from `seed`.
/// CLS: binary cross-entropy on answerability for the binary head and
/// cross-entropy on the answerable examples for the classifier.
/// ENT / MAXLOGIT: cross-entropy against one-hot targets, or the uniform
/// target for unanswerable examples.
SelectiveHeads fit_selective(std::span<const TrainingExample> train, const TrainConfig& config);

}  // namespace abstain::selective
