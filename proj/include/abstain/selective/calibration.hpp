// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "abstain/selective/selective.hpp"

namespace abstain::selective {

/// A scored validation instance; an empty gold answer means unanswerable.
struct ScoredExample {
  AnswerDistribution dist;
  double confidence = 0.0;
  std::optional<std::size_t> gold;
};

/// Correct iff the model abstains on an unanswerable instance or answers an
/// answerable one with the gold id.
bool selective_correct(const SelectiveOutput& out, const std::optional<std::size_t>& gold);

struct CurvePoint {
  double theta = 0.0;
  double accuracy = 0.0;
  double coverage = 0.0;  // fraction answered
};

struct Calibration {
  double theta = 0.0;
  std::vector<CurvePoint> curve;  // one point per grid value, grid order
};

/// Open-set accuracy at every grid point; returns the best theta, smallest on ties.
Calibration calibrate_threshold(std::span<const ScoredExample> validation, Variant variant,
                                std::span<const double> grid);

/// Evenly spaced grid from `lo` to `hi` inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace abstain::selective
