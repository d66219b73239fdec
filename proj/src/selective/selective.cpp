// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/selective/selective.hpp"

#include <algorithm>
#include <cmath>

#include "abstain/core/error.hpp"

namespace abstain::selective {

FusedFeature fuse(std::span<const double> image_encoding, std::span<const double> text_encoding,
                  std::string id) {
  FusedFeature out{std::move(id), {}};
  out.x.reserve(image_encoding.size() + text_encoding.size());
  out.x.insert(out.x.end(), image_encoding.begin(), image_encoding.end());
  out.x.insert(out.x.end(), text_encoding.begin(), text_encoding.end());
  for (double v : out.x) {
    if (!std::isfinite(v)) throw Error("fuse: non-finite encoding entry");
  }
  return out;
}

std::size_t AnswerDistribution::argmax() const {
  if (probs.empty()) throw Error("argmax of an empty distribution");
  // std::max_element keeps the first maximum.
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

AnswerDistribution softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error("softmax: empty logits");
  for (double v : logits) {
    if (!std::isfinite(v)) throw Error("softmax: non-finite logit");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  AnswerDistribution out;
  out.logits.assign(logits.begin(), logits.end());
  out.probs.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.probs[i] = std::exp(logits[i] - top);
    total += out.probs[i];
  }
  for (double& p : out.probs) p /= total;
  return out;
}

void validate(const AnswerDistribution& dist) {
  if (dist.probs.empty()) throw Error("distribution is empty");
  double total = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("distribution has a negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error("distribution does not sum to 1");
}

ClassifierHead ClassifierHead::zeros(std::size_t answers, std::size_t dims) {
  return {answers, dims, std::vector<double>(answers * dims, 0.0), std::vector<double>(answers, 0.0)};
}

std::vector<double> ClassifierHead::logits(std::span<const double> x) const {
  if (x.size() != dims) {
    throw Error("classifier head expects " + std::to_string(dims) + " dims, got " +
                std::to_string(x.size()));
  }
  std::vector<double> out(bias);
  for (std::size_t a = 0; a < answers; ++a) {
    const double* row = weight.data() + a * dims;
    for (std::size_t d = 0; d < dims; ++d) out[a] += row[d] * x[d];
  }
  return out;
}

BinaryHead BinaryHead::zeros(std::size_t dims) { return {std::vector<double>(dims, 0.0), 0.0}; }

double BinaryHead::logit(std::span<const double> x) const {
  if (x.size() != weight.size()) {
    throw Error("binary head expects " + std::to_string(weight.size()) + " dims, got " +
                std::to_string(x.size()));
  }
  double z = bias;
  for (std::size_t d = 0; d < x.size(); ++d) z += weight[d] * x[d];
  return z;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

AnswerDistribution predict_answer(const FusedFeature& feature, const ClassifierHead& head) {
  return softmax(head.logits(feature.x));
}

double confidence_cls(const FusedFeature& feature, const BinaryHead& head) {
  return sigmoid(head.logit(feature.x));
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double confidence_ent(const AnswerDistribution& dist, EntMode mode) {
  if (mode == EntMode::kEntropy) return entropy(dist.probs);
  if (dist.logits.empty()) throw Error("max-logit confidence needs the pre-softmax logits");
  return *std::max_element(dist.logits.begin(), dist.logits.end());
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kCls: return "CLS";
    case Variant::kEnt: return "ENT";
    case Variant::kMaxLogit: return "MAXLOGIT";
  }
  return "?";
}

Variant variant_from_string(std::string_view text) {
  if (text == "CLS" || text == "cls") return Variant::kCls;
  if (text == "ENT" || text == "ent") return Variant::kEnt;
  if (text == "MAXLOGIT" || text == "maxlogit") return Variant::kMaxLogit;
  throw Error("unknown selective variant '" + std::string(text) + "'");
}

SelectiveOutput select(const AnswerDistribution& dist, double confidence,
                       const SelectiveConfig& config) {
  SelectiveOutput out;
  out.confidence = confidence;
  const bool answer = config.variant == Variant::kEnt ? !(confidence > config.theta)
                                                      : confidence >= config.theta;
  if (answer) out.answer = dist.argmax();
  return out;
}

AnswerDistribution uniform_target(std::size_t answer_set_size) {
  if (answer_set_size == 0) throw Error("uniform_target: empty answer set");
  AnswerDistribution out;
  out.probs.assign(answer_set_size, 1.0 / static_cast<double>(answer_set_size));
  return out;
}

}  // namespace abstain::selective
