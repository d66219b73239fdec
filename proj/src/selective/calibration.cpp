// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/selective/calibration.hpp"

#include <cmath>

#include "abstain/core/error.hpp"

namespace abstain::selective {

bool selective_correct(const SelectiveOutput& out, const std::optional<std::size_t>& gold) {
  if (!gold) return out.abstained();
  return !out.abstained() && *out.answer == *gold;
}

Calibration calibrate_threshold(std::span<const ScoredExample> validation, Variant variant,
                                std::span<const double> grid) {
  if (grid.empty()) throw Error("calibrate_threshold: empty grid");
  if (validation.empty()) throw Error("calibrate_threshold: empty validation set");
  Calibration out;
  out.curve.reserve(grid.size());
  bool have_best = false;
  double best_accuracy = 0.0;
  for (double theta : grid) {
    if (!std::isfinite(theta)) throw Error("calibrate_threshold: non-finite grid value");
    int correct = 0;
    int answered = 0;
    for (const auto& ex : validation) {
      const auto result = select(ex.dist, ex.confidence, {variant, theta});
      correct += selective_correct(result, ex.gold);
      answered += !result.abstained();
    }
    const double n = static_cast<double>(validation.size());
    out.curve.push_back({theta, correct / n, answered / n});
    const double acc = out.curve.back().accuracy;
    if (!have_best || acc > best_accuracy || (acc == best_accuracy && theta < out.theta)) {
      have_best = true;
      best_accuracy = acc;
      out.theta = theta;
    }
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw Error("linear_grid: zero points");
  if (points == 1) return {lo};
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return out;
}

}  // namespace abstain::selective
