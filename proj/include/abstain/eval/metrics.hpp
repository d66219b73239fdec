// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "abstain/eval/parse.hpp"

namespace abstain::eval {

/// Fraction of responses whose answerable/unanswerable verdict matches the
/// gold answerability. Anything else (including out-of-scope) is wrong.
double acc_binary(std::span<const ParsedResponse> parsed, std::span<const bool> gold_answerable);

struct OpenGold {
  std::vector<std::string> valid;  // accepted answers
  bool unanswerable = false;       // adds "unanswerable" to the accepted set
};

/// Exact match after answer normalization.
bool open_correct(std::string_view prediction, const OpenGold& gold);

double acc_open(std::span<const std::string> predictions, std::span<const OpenGold> gold);

/// Support-weighted mean of per-class F1 over the classes present in `gold`.
/// A class never predicted and never correct contributes F1 = 0.
double weighted_f1(std::span<const int> predictions, std::span<const int> gold);

}  // namespace abstain::eval
