// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace abstain {

enum class AnswerType { kYesNo, kNumber, kOther };
enum class Split { kTrain, kValid, kTest, kUnassigned };

std::string_view to_string(AnswerType type);
std::string_view to_string(Split split);
AnswerType parse_answer_type(std::string_view text);  // accepts "yes/no" too
Split parse_split(std::string_view text);

struct VqaInstance {
  std::string id;
  std::string image_ref;
  std::string question;
  std::vector<std::string> answers;
  std::string question_type;
  AnswerType answer_type = AnswerType::kOther;
  Split split = Split::kUnassigned;

  bool operator==(const VqaInstance&) const = default;
};

/// The most frequent ground-truth answer; first occurrence wins ties.
std::string primary_answer(const VqaInstance& instance);

enum class PerturbationKind {
  kWordReplace,   // T-1
  kNegation,      // T-2
  kImageReplace,  // I-1
  kObjectMask,    // I-2
  kCopyMove,      // I-3
};

std::string_view to_string(PerturbationKind kind);
PerturbationKind parse_perturbation_kind(std::string_view text);
bool is_text_kind(PerturbationKind kind);

struct PerturbationRecord {
  std::string source_id;
  PerturbationKind kind = PerturbationKind::kWordReplace;
  std::optional<std::string> perturbed_question;
  std::optional<std::string> perturbed_image_ref;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::string> baseline_answer;

  bool operator==(const PerturbationRecord&) const = default;
};

/// Throws abstain::Error when the text/image exclusivity invariant is broken.
void validate(const PerturbationRecord& record);

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> valid_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const VqaInstance& instance);
VqaInstance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PerturbationRecord& record);
PerturbationRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetSplit& split);

}  // namespace abstain
