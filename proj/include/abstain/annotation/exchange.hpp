// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "abstain/annotation/types.hpp"

namespace abstain::annotation {

// CSV is the exchange format with the crowd platform; JSONL is internal
// storage. Header rows:
//   tasks:     task_id,source_id,kind,image,question,question_type,answer_type,
//              option_original,option_baseline,option_random,exemplars
//   responses: task_id,worker_id,answerable,reason,unanswerable_answer,
//              altered_element,chosen_answer,confidence
// The exemplars cell holds a JSON array; empty cells mean "absent".

void export_tasks(std::span<const AnnotationTask> tasks, const std::filesystem::path& path);
std::vector<AnnotationTask> load_tasks_csv(const std::filesystem::path& path);

void save_tasks(std::span<const AnnotationTask> tasks, const std::filesystem::path& path);
std::vector<AnnotationTask> load_tasks(const std::filesystem::path& path);

void export_responses(std::span<const AnnotatorResponse> responses,
                      const std::filesystem::path& path);

struct IngestResult {
  std::vector<AnnotatorResponse> accepted;
  std::vector<std::string> rejected;  // "row N: reason"
};

/// Parses a response CSV. Rows violating the response invariants are
/// rejected individually; a missing file or bad header throws.
IngestResult ingest_responses(const std::filesystem::path& path);

void save_responses(std::span<const AnnotatorResponse> responses,
                    const std::filesystem::path& path);
/// JSONL or CSV, chosen by extension.
std::vector<AnnotatorResponse> load_responses(const std::filesystem::path& path);

}  // namespace abstain::annotation
