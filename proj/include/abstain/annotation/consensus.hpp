// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abstain/annotation/types.hpp"

namespace abstain::annotation {

inline constexpr std::size_t kMinAnnotators = 3;

/// Strict majority of answerable/unanswerable votes; an exact tie is
/// no-consensus and should be sent out for another round. Needs at least
/// three responses, all for the same task ("under-annotated" otherwise).
ConsensusLabel majority_vote(std::span<const AnnotatorResponse> responses);

/// The majority side's plurality pick: a refusal for unanswerable, an
/// answer option for answerable.
struct ConsensusAnswer {
  std::optional<Refusal> refusal;
  std::optional<OptionSource> option;
};

/// Ties go to the choice whose voters have the higher mean confidence, then
/// to enum order (A1 < A2 < A3, original < baseline < random). Throws
/// abstain::Error for a no-consensus label.
ConsensusAnswer consensus_answer(std::span<const AnnotatorResponse> responses, Verdict label);

/// Answer text for a consensus pick: the refusal phrase or the option text.
std::string answer_text(const ConsensusAnswer& answer, const AnnotationTask& task);

/// Plurality unanswerability reason among unanswerable voters, same tie rule;
/// empty when nobody voted unanswerable.
std::optional<Reason> consensus_reason(std::span<const AnnotatorResponse> responses);

/// Groups responses by task id (responses for one task keep their order).
std::map<std::string, std::vector<AnnotatorResponse>> group_by_task(
    std::span<const AnnotatorResponse> responses);

}  // namespace abstain::annotation
