// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abstain/annotation/types.hpp"
#include "abstain/core/types.hpp"

namespace abstain::annotation {

struct BuiltTask {
  AnnotationTask task;
  std::vector<std::string> warnings;
};

/// Deterministic id "<source_id>/<kind>/<8 hex digits of the perturbed artifact>".
std::string make_task_id(const PerturbationRecord& record);

/// Builds the labeling task for one perturbed instance. The random option is
/// drawn (seeded) from the primary answers of corpus instances sharing the
/// source's question_type, excluding the original and baseline answers; when
/// that group is exhausted the draw falls back to the whole corpus with a
/// warning. Throws abstain::Error when the baseline coincides with the
/// original answer or no distinct random answer exists.
BuiltTask build_task(const PerturbationRecord& record, const VqaInstance& source,
                     const std::string& baseline_answer, std::uint64_t seed,
                     std::span<const VqaInstance> corpus, std::span<const Exemplar> exemplars = {});

}  // namespace abstain::annotation
