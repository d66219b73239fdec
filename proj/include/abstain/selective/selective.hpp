// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abstain::selective {

/// Joint image/question representation consumed by the heads.
struct FusedFeature {
  std::string id;
  std::vector<double> x;
};

/// Reference fusion: concatenation of the two encodings.
FusedFeature fuse(std::span<const double> image_encoding, std::span<const double> text_encoding,
                  std::string id = {});

struct AnswerDistribution {
  std::vector<double> probs;
  std::vector<double> logits;  // pre-softmax scores; empty when built from probabilities

  /// Index of the largest probability, lowest id on ties.
  std::size_t argmax() const;
  std::size_t size() const { return probs.size(); }
};

/// Numerically stable softmax. Throws abstain::Error on non-finite logits.
AnswerDistribution softmax(std::span<const double> logits);

/// Throws abstain::Error unless entries are >= 0 and sum to 1 within 1e-6.
void validate(const AnswerDistribution& dist);

/// Affine answer classifier: logits = W x + b, W stored row-major (answers x dims).
struct ClassifierHead {
  std::size_t answers = 0;
  std::size_t dims = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  static ClassifierHead zeros(std::size_t answers, std::size_t dims);
  std::vector<double> logits(std::span<const double> x) const;
};

/// Answerability head: sigmoid(w . x + b).
struct BinaryHead {
  std::vector<double> weight;
  double bias = 0.0;

  static BinaryHead zeros(std::size_t dims);
  double logit(std::span<const double> x) const;
};

double sigmoid(double z);

AnswerDistribution predict_answer(const FusedFeature& feature, const ClassifierHead& head);

double confidence_cls(const FusedFeature& feature, const BinaryHead& head);

/// Shannon entropy in nats with 0 log 0 = 0.
double entropy(std::span<const double> probs);

enum class EntMode { kEntropy, kMaxLogit };

/// Entropy of the distribution, or its largest pre-softmax logit.
double confidence_ent(const AnswerDistribution& dist, EntMode mode);

enum class Variant { kCls, kEnt, kMaxLogit };

std::string_view to_string(Variant variant);
Variant variant_from_string(std::string_view text);

struct SelectiveConfig {
  Variant variant = Variant::kCls;
  double theta = 0.5;
};

struct SelectiveOutput {
  std::optional<std::size_t> answer;  // empty means abstain
  double confidence = 0.0;

  bool abstained() const { return !answer.has_value(); }
};

/// CLS and MAXLOGIT answer iff confidence >= theta. ENT treats `confidence`
/// as the entropy and abstains iff it exceeds theta.
SelectiveOutput select(const AnswerDistribution& dist, double confidence,
                       const SelectiveConfig& config);

/// (1/n, ..., 1/n); throws abstain::Error for n == 0.
AnswerDistribution uniform_target(std::size_t answer_set_size);

}  // namespace abstain::selective
