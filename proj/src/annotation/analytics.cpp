// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/annotation/analytics.hpp"

#include "abstain/annotation/consensus.hpp"

namespace abstain::annotation {

AnalyticsReport analytics(std::span<const AnnotatorResponse> responses,
                          std::span<const ConsensusLabel> consensus,
                          const std::map<std::string, std::string>& task_kinds) {
  AnalyticsReport report;
  std::map<std::string, Verdict> label_of;
  for (const auto& c : consensus) {
    label_of[c.task_id] = c.label;
    ++report.consensus_counts[static_cast<std::size_t>(c.label)];
  }

  for (const auto& r : responses) {
    if (r.confidence < 1 || r.confidence > 5) continue;
    const auto row = static_cast<std::size_t>(r.confidence - 1);
    ++report.confidence_by_vote[row][r.answerable ? 0 : 1];
    if (auto it = label_of.find(r.task_id); it != label_of.end()) {
      ++report.confidence_by_consensus[row][static_cast<std::size_t>(it->second)];
    }
    if (!r.answerable && r.reason && r.refusal) {
      ++report.reason_refusal[static_cast<std::size_t>(*r.reason)][static_cast<std::size_t>(*r.refusal)];
      ++report.reason_counts[static_cast<std::size_t>(*r.reason)];
    }
  }

  const auto by_task = group_by_task(responses);
  for (const auto& c : consensus) {
    if (c.label == Verdict::kAnswerable) {
      auto it = by_task.find(c.task_id);
      if (it == by_task.end()) continue;
      const auto answer = consensus_answer(it->second, c.label);
      if (answer.option) ++report.answer_shift[static_cast<std::size_t>(*answer.option)];
    }
    if (c.label == Verdict::kNoConsensus) continue;
    if (auto k = task_kinds.find(c.task_id); k != task_kinds.end()) {
      auto& ratio = report.unanswerable_by_kind[k->second];
      ++ratio.total;
      ratio.unanswerable += c.label == Verdict::kUnanswerable;
    }
  }

  const int shifted = report.answer_shift[0] + report.answer_shift[1] + report.answer_shift[2];
  for (std::size_t i = 0; i < 3; ++i) {
    report.answer_shift_percent[i] = shifted ? 100.0 * report.answer_shift[i] / shifted : 0.0;
  }
  for (auto& [_, ratio] : report.unanswerable_by_kind) {
    ratio.ratio = ratio.total ? static_cast<double>(ratio.unanswerable) / ratio.total : 0.0;
  }
  return report;
}

nlohmann::json to_json(const AnalyticsReport& report) {
  nlohmann::json j;
  j["confidence_by_consensus"] = report.confidence_by_consensus;
  j["confidence_by_vote"] = report.confidence_by_vote;
  j["consensus_counts"] = {{"answerable", report.consensus_counts[0]},
                           {"unanswerable", report.consensus_counts[1]},
                           {"no-consensus", report.consensus_counts[2]}};
  j["reason_refusal"] = report.reason_refusal;
  j["reason_counts"] = report.reason_counts;
  j["answer_shift"] = {{"original", report.answer_shift[0]},
                       {"baseline", report.answer_shift[1]},
                       {"random", report.answer_shift[2]}};
  j["answer_shift_percent"] = {{"original", report.answer_shift_percent[0]},
                               {"baseline", report.answer_shift_percent[1]},
                               {"random", report.answer_shift_percent[2]}};
  nlohmann::json kinds = nlohmann::json::object();
  for (const auto& [kind, r] : report.unanswerable_by_kind) {
    kinds[kind] = {{"unanswerable", r.unanswerable}, {"total", r.total}, {"ratio", r.ratio}};
  }
  j["unanswerable_by_kind"] = kinds;
  return j;
}

}  // namespace abstain::annotation
