// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/core/types.hpp"

#include <algorithm>
#include <map>

#include "abstain/core/error.hpp"

namespace abstain {

ValidationError::ValidationError(std::vector<std::string> diagnostics)
    : Error([&] {
        std::string msg = std::to_string(diagnostics.size()) + " validation error(s)";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::string_view to_string(AnswerType type) {
  switch (type) {
    case AnswerType::kYesNo: return "yes-no";
    case AnswerType::kNumber: return "number";
    case AnswerType::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
    case Split::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

AnswerType parse_answer_type(std::string_view text) {
  if (text == "yes-no" || text == "yes/no") return AnswerType::kYesNo;
  if (text == "number") return AnswerType::kNumber;
  if (text == "other") return AnswerType::kOther;
  throw Error("unknown answer_type '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid" || text == "val") return Split::kValid;
  if (text == "test") return Split::kTest;
  if (text == "unassigned" || text.empty()) return Split::kUnassigned;
  throw Error("unknown split '" + std::string(text) + "'");
}

std::string primary_answer(const VqaInstance& instance) {
  if (instance.answers.empty()) return {};
  std::map<std::string, int> counts;
  for (const auto& a : instance.answers) ++counts[a];
  const std::string* best = &instance.answers.front();
  int best_count = 0;
  for (const auto& a : instance.answers) {
    if (counts[a] > best_count) {
      best = &a;
      best_count = counts[a];
    }
  }
  return *best;
}

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kWordReplace: return "T1_word_replace";
    case PerturbationKind::kNegation: return "T2_negation";
    case PerturbationKind::kImageReplace: return "I1_image_replace";
    case PerturbationKind::kObjectMask: return "I2_object_mask";
    case PerturbationKind::kCopyMove: return "I3_copy_move";
  }
  return "T1_word_replace";
}

PerturbationKind parse_perturbation_kind(std::string_view text) {
  for (auto k : {PerturbationKind::kWordReplace, PerturbationKind::kNegation,
                 PerturbationKind::kImageReplace, PerturbationKind::kObjectMask,
                 PerturbationKind::kCopyMove}) {
    if (to_string(k) == text) return k;
  }
  throw Error("unknown perturbation kind '" + std::string(text) + "'");
}

bool is_text_kind(PerturbationKind kind) {
  return kind == PerturbationKind::kWordReplace || kind == PerturbationKind::kNegation;
}

void validate(const PerturbationRecord& record) {
  if (record.source_id.empty()) throw Error("perturbation record without source_id");
  const bool text = is_text_kind(record.kind);
  if (text && (!record.perturbed_question || record.perturbed_image_ref)) {
    throw Error("record " + record.source_id + ": text perturbation must set only perturbed_question");
  }
  if (!text && (!record.perturbed_image_ref || record.perturbed_question)) {
    throw Error("record " + record.source_id + ": image perturbation must set only perturbed_image");
  }
  if (!record.params.is_object()) throw Error("record " + record.source_id + ": params must be an object");
}

nlohmann::json to_json(const VqaInstance& instance) {
  return {
      {"id", instance.id},
      {"image", instance.image_ref},
      {"question", instance.question},
      {"answers", instance.answers},
      {"question_type", instance.question_type},
      {"answer_type", to_string(instance.answer_type)},
      {"split", to_string(instance.split)},
  };
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

}  // namespace

VqaInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  VqaInstance out;
  out.id = require_string(j, "id");
  if (out.id.empty()) throw Error("field 'id' must be non-empty");
  out.image_ref = require_string(j, "image");
  out.question = require_string(j, "question");
  if (out.question.empty()) throw Error("field 'question' must be non-empty");
  const auto& answers = require(j, "answers");
  if (!answers.is_array()) throw Error("field 'answers' must be an array of strings");
  for (const auto& a : answers) {
    if (!a.is_string()) throw Error("field 'answers' must be an array of strings");
    out.answers.push_back(a.get<std::string>());
  }
  if (out.answers.empty()) throw Error("field 'answers' must be non-empty");
  out.question_type = require_string(j, "question_type");
  out.answer_type = parse_answer_type(require_string(j, "answer_type"));
  if (auto s = optional_string(j, "split")) out.split = parse_split(*s);
  return out;
}

nlohmann::json to_json(const PerturbationRecord& record) {
  nlohmann::json j = {
      {"source_id", record.source_id},
      {"kind", to_string(record.kind)},
      {"perturbed_question", nullptr},
      {"perturbed_image", nullptr},
      {"params", record.params},
      {"baseline_answer", nullptr},
  };
  if (record.perturbed_question) j["perturbed_question"] = *record.perturbed_question;
  if (record.perturbed_image_ref) j["perturbed_image"] = *record.perturbed_image_ref;
  if (record.baseline_answer) j["baseline_answer"] = *record.baseline_answer;
  return j;
}

PerturbationRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  PerturbationRecord out;
  out.source_id = require_string(j, "source_id");
  out.kind = parse_perturbation_kind(require_string(j, "kind"));
  out.perturbed_question = optional_string(j, "perturbed_question");
  out.perturbed_image_ref = optional_string(j, "perturbed_image");
  if (auto it = j.find("params"); it != j.end()) out.params = *it;
  out.baseline_answer = optional_string(j, "baseline_answer");
  validate(out);
  return out;
}

nlohmann::json to_json(const DatasetSplit& split) {
  return {{"train", split.train_ids},
          {"valid", split.valid_ids},
          {"test", split.test_ids},
          {"seed", split.seed}};
}

}  // namespace abstain
