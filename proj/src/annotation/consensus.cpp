// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/annotation/consensus.hpp"

#include <array>

#include "abstain/core/error.hpp"

namespace abstain::annotation {
namespace {

// Plurality over N enum values with the mean-confidence, then enum-order,
// tie-break. `pick` returns the index voted for, or -1 to abstain.
template <std::size_t N, typename Pick>
std::optional<std::size_t> plurality(std::span<const AnnotatorResponse> responses, Pick pick) {
  std::array<int, N> votes{};
  std::array<int, N> confidence{};
  for (const auto& r : responses) {
    const int i = pick(r);
    if (i < 0) continue;
    ++votes[static_cast<std::size_t>(i)];
    confidence[static_cast<std::size_t>(i)] += r.confidence;
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < N; ++i) {
    if (votes[i] == 0) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto b = *best;
    if (votes[i] > votes[b]) {
      best = i;
    } else if (votes[i] == votes[b]) {
      // Compare mean confidences without division: c_i / v_i > c_b / v_b.
      if (static_cast<long long>(confidence[i]) * votes[b] >
          static_cast<long long>(confidence[b]) * votes[i]) {
        best = i;
      }
    }
  }
  return best;
}

}  // namespace

ConsensusLabel majority_vote(std::span<const AnnotatorResponse> responses) {
  if (responses.size() < kMinAnnotators) {
    throw Error("under-annotated: " + std::to_string(responses.size()) + " response(s), need " +
                std::to_string(kMinAnnotators));
  }
  ConsensusLabel out;
  out.task_id = responses.front().task_id;
  int confidence = 0;
  for (const auto& r : responses) {
    if (r.task_id != out.task_id) throw Error("majority_vote: responses span several tasks");
    (r.answerable ? out.answerable_votes : out.unanswerable_votes)++;
    confidence += r.confidence;
  }
  out.mean_confidence = static_cast<double>(confidence) / static_cast<double>(responses.size());
  if (out.answerable_votes > out.unanswerable_votes) {
    out.label = Verdict::kAnswerable;
  } else if (out.unanswerable_votes > out.answerable_votes) {
    out.label = Verdict::kUnanswerable;
  } else {
    out.label = Verdict::kNoConsensus;
  }
  return out;
}

ConsensusAnswer consensus_answer(std::span<const AnnotatorResponse> responses, Verdict label) {
  ConsensusAnswer out;
  if (label == Verdict::kNoConsensus) throw Error("consensus_answer: no consensus label");
  if (label == Verdict::kUnanswerable) {
    const auto best = plurality<3>(responses, [](const AnnotatorResponse& r) {
      return (!r.answerable && r.refusal) ? static_cast<int>(*r.refusal) : -1;
    });
    if (best) out.refusal = static_cast<Refusal>(*best);
  } else {
    const auto best = plurality<3>(responses, [](const AnnotatorResponse& r) {
      return (r.answerable && r.chosen_answer) ? static_cast<int>(*r.chosen_answer) : -1;
    });
    if (best) out.option = static_cast<OptionSource>(*best);
  }
  return out;
}

std::string answer_text(const ConsensusAnswer& answer, const AnnotationTask& task) {
  if (answer.refusal) return std::string(phrase(*answer.refusal));
  if (answer.option) return task.option(*answer.option).text;
  return {};
}

std::optional<Reason> consensus_reason(std::span<const AnnotatorResponse> responses) {
  const auto best = plurality<4>(responses, [](const AnnotatorResponse& r) {
    return (!r.answerable && r.reason) ? static_cast<int>(*r.reason) : -1;
  });
  if (!best) return std::nullopt;
  return static_cast<Reason>(*best);
}

std::map<std::string, std::vector<AnnotatorResponse>> group_by_task(
    std::span<const AnnotatorResponse> responses) {
  std::map<std::string, std::vector<AnnotatorResponse>> out;
  for (const auto& r : responses) out[r.task_id].push_back(r);
  return out;
}

}  // namespace abstain::annotation
