// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "abstain/core/types.hpp"

namespace abstain::annotation {

/// Why an annotator judged a question unanswerable.
enum class Reason { kUnclear, kNeedsKnowledge, kMissingConcept, kMultipleAnswers };  // R1..R4

/// What an annotator would reply to an unanswerable question.
enum class Refusal { kCannotAnswer, kDontKnow, kNotSure };  // A1..A3

enum class AlteredElement { kImage, kQuestion };

/// Provenance of an answer option shown for answerable questions.
enum class OptionSource { kOriginal, kBaseline, kRandom };

std::string_view code(Reason r);          // "R1"
std::string_view description(Reason r);   // "is unclear to comprehend"
std::string_view code(Refusal a);         // "A1"
std::string_view phrase(Refusal a);       // "I cannot answer"
std::string_view to_string(AlteredElement e);
std::string_view to_string(OptionSource s);

Reason parse_reason(std::string_view text);
Refusal parse_refusal(std::string_view text);
AlteredElement parse_altered_element(std::string_view text);
OptionSource parse_option_source(std::string_view text);

struct AnswerOption {
  std::string text;
  OptionSource source = OptionSource::kOriginal;

  bool operator==(const AnswerOption&) const = default;
};

/// An unanswerable example shown to annotators before they start labeling.
struct Exemplar {
  std::string image_ref;
  std::string question;
  Reason reason = Reason::kUnclear;

  bool operator==(const Exemplar&) const = default;
};

struct AnnotationTask {
  std::string task_id;
  std::string source_id;
  PerturbationKind kind = PerturbationKind::kWordReplace;
  std::string image_ref;
  std::string question;
  std::string question_type;
  AnswerType answer_type = AnswerType::kOther;
  std::vector<Exemplar> exemplars;
  std::array<AnswerOption, 3> options;  // original, baseline, random

  bool operator==(const AnnotationTask&) const = default;
  const AnswerOption& option(OptionSource source) const;
};

struct AnnotatorResponse {
  std::string task_id;
  std::string worker_id;
  bool answerable = false;
  std::optional<Reason> reason;
  std::optional<Refusal> refusal;
  std::optional<AlteredElement> altered_element;
  std::optional<OptionSource> chosen_answer;
  int confidence = 0;  // 1..5

  bool operator==(const AnnotatorResponse&) const = default;
};

/// Throws abstain::Error describing the first broken invariant: reason and
/// refusal iff unanswerable, altered element and chosen answer iff
/// answerable, confidence in 1..5, non-empty ids.
void validate(const AnnotatorResponse& response);

enum class Verdict { kAnswerable, kUnanswerable, kNoConsensus };
std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct ConsensusLabel {
  std::string task_id;
  Verdict label = Verdict::kNoConsensus;
  int answerable_votes = 0;
  int unanswerable_votes = 0;
  double mean_confidence = 0.0;
};

nlohmann::json to_json(const AnnotationTask& task);
AnnotationTask task_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnnotatorResponse& response);
AnnotatorResponse response_from_json(const nlohmann::json& j);  // validates
nlohmann::json to_json(const ConsensusLabel& label);

}  // namespace abstain::annotation
