// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "abstain/annotation/types.hpp"

namespace abstain::annotation {

struct KindRatio {
  int unanswerable = 0;
  int total = 0;  // tasks with a consensus (ties excluded)
  double ratio = 0.0;
};

struct AnalyticsReport {
  // Responses by confidence (row 0 = confidence 1) and by the task's
  // consensus label (answerable, unanswerable, no-consensus).
  std::array<std::array<int, 3>, 5> confidence_by_consensus{};
  // Responses by confidence and by the response's own vote (answerable, unanswerable).
  std::array<std::array<int, 2>, 5> confidence_by_vote{};
  std::array<int, 3> consensus_counts{};  // indexed by Verdict
  // Unanswerable responses, reason (R1..R4) x refusal (A1..A3).
  std::array<std::array<int, 3>, 4> reason_refusal{};
  std::array<int, 4> reason_counts{};
  // Consensus answer of answerable tasks, by provenance.
  std::array<int, 3> answer_shift{};
  std::array<double, 3> answer_shift_percent{};
  std::map<std::string, KindRatio> unanswerable_by_kind;
};

/// `consensus` holds one label per task; `task_kinds` maps task id to the
/// perturbation kind name for the per-kind ratio (tasks missing from it are
/// left out of that breakdown).
AnalyticsReport analytics(std::span<const AnnotatorResponse> responses,
                          std::span<const ConsensusLabel> consensus,
                          const std::map<std::string, std::string>& task_kinds = {});

nlohmann::json to_json(const AnalyticsReport& report);

}  // namespace abstain::annotation
