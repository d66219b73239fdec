// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/eval/metrics.hpp"

#include <map>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"

namespace abstain::eval {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                std::to_string(b) + ")");
  }
}

}  // namespace

double acc_binary(std::span<const ParsedResponse> parsed, std::span<const bool> gold_answerable) {
  check_lengths(parsed.size(), gold_answerable.size(), "acc_binary");
  if (parsed.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto v = parsed[i].verdict;
    correct += (gold_answerable[i] && v == VerdictKind::kAnswerable) ||
               (!gold_answerable[i] && v == VerdictKind::kUnanswerable);
  }
  return static_cast<double>(correct) / static_cast<double>(parsed.size());
}

bool open_correct(std::string_view prediction, const OpenGold& gold) {
  const auto p = normalize_open_answer(prediction);
  if (p.empty()) return false;
  if (gold.unanswerable && p == "unanswerable") return true;
  for (const auto& v : gold.valid) {
    if (normalize_open_answer(v) == p) return true;
  }
  return false;
}

double acc_open(std::span<const std::string> predictions, std::span<const OpenGold> gold) {
  check_lengths(predictions.size(), gold.size(), "acc_open");
  if (predictions.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += open_correct(predictions[i], gold[i]);
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double weighted_f1(std::span<const int> predictions, std::span<const int> gold) {
  check_lengths(predictions.size(), gold.size(), "weighted_f1");
  if (gold.empty()) return 0.0;
  struct Counts {
    long support = 0;
    long predicted = 0;
    long hits = 0;
  };
  std::map<int, Counts> classes;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++classes[gold[i]].support;
    ++classes[predictions[i]].predicted;
    if (predictions[i] == gold[i]) ++classes[gold[i]].hits;
  }
  double total = 0.0;
  long support = 0;
  for (const auto& [_, c] : classes) {
    if (c.support == 0) continue;
    const double p = c.predicted ? static_cast<double>(c.hits) / c.predicted : 0.0;
    const double r = static_cast<double>(c.hits) / c.support;
    const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    total += static_cast<double>(c.support) * f1;
    support += c.support;
  }
  return total / static_cast<double>(support);
}

}  // namespace abstain::eval
