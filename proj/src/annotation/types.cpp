// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/annotation/types.hpp"

#include "abstain/core/error.hpp"

namespace abstain::annotation {

std::string_view code(Reason r) {
  switch (r) {
    case Reason::kUnclear: return "R1";
    case Reason::kNeedsKnowledge: return "R2";
    case Reason::kMissingConcept: return "R3";
    case Reason::kMultipleAnswers: return "R4";
  }
  return "R1";
}

std::string_view description(Reason r) {
  switch (r) {
    case Reason::kUnclear: return "is unclear to comprehend";
    case Reason::kNeedsKnowledge: return "requires higher-level knowledge";
    case Reason::kMissingConcept: return "refers to concepts the image lacks";
    case Reason::kMultipleAnswers: return "has multiple answers";
  }
  return "is unclear to comprehend";
}

std::string_view code(Refusal a) {
  switch (a) {
    case Refusal::kCannotAnswer: return "A1";
    case Refusal::kDontKnow: return "A2";
    case Refusal::kNotSure: return "A3";
  }
  return "A1";
}

std::string_view phrase(Refusal a) {
  switch (a) {
    case Refusal::kCannotAnswer: return "I cannot answer";
    case Refusal::kDontKnow: return "I don't know";
    case Refusal::kNotSure: return "Not sure";
  }
  return "I cannot answer";
}

std::string_view to_string(AlteredElement e) {
  return e == AlteredElement::kImage ? "image" : "question";
}

std::string_view to_string(OptionSource s) {
  switch (s) {
    case OptionSource::kOriginal: return "original";
    case OptionSource::kBaseline: return "baseline";
    case OptionSource::kRandom: return "random";
  }
  return "original";
}

Reason parse_reason(std::string_view text) {
  for (auto r : {Reason::kUnclear, Reason::kNeedsKnowledge, Reason::kMissingConcept,
                 Reason::kMultipleAnswers}) {
    if (code(r) == text) return r;
  }
  throw Error("unknown reason '" + std::string(text) + "'");
}

Refusal parse_refusal(std::string_view text) {
  for (auto a : {Refusal::kCannotAnswer, Refusal::kDontKnow, Refusal::kNotSure}) {
    if (code(a) == text) return a;
  }
  throw Error("unknown unanswerable answer '" + std::string(text) + "'");
}

AlteredElement parse_altered_element(std::string_view text) {
  if (text == "image") return AlteredElement::kImage;
  if (text == "question") return AlteredElement::kQuestion;
  throw Error("unknown altered element '" + std::string(text) + "'");
}

OptionSource parse_option_source(std::string_view text) {
  for (auto s : {OptionSource::kOriginal, OptionSource::kBaseline, OptionSource::kRandom}) {
    if (to_string(s) == text) return s;
  }
  throw Error("unknown answer option '" + std::string(text) + "'");
}

const AnswerOption& AnnotationTask::option(OptionSource source) const {
  for (const auto& o : options) {
    if (o.source == source) return o;
  }
  throw Error("task " + task_id + " has no " + std::string(to_string(source)) + " option");
}

void validate(const AnnotatorResponse& r) {
  if (r.task_id.empty()) throw Error("response without task_id");
  if (r.worker_id.empty()) throw Error("response without worker_id");
  if (r.confidence < 1 || r.confidence > 5) {
    throw Error("confidence " + std::to_string(r.confidence) + " outside 1..5");
  }
  if (r.answerable) {
    if (r.reason || r.refusal) throw Error("answerable response must not carry a reason or refusal");
    if (!r.altered_element || !r.chosen_answer) {
      throw Error("answerable response needs altered_element and chosen_answer");
    }
  } else {
    if (r.altered_element || r.chosen_answer) {
      throw Error("unanswerable response must not carry altered_element or chosen_answer");
    }
    if (!r.reason || !r.refusal) throw Error("unanswerable response needs reason and refusal");
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kAnswerable: return "answerable";
    case Verdict::kUnanswerable: return "unanswerable";
    case Verdict::kNoConsensus: return "no-consensus";
  }
  return "no-consensus";
}

Verdict parse_verdict(std::string_view text) {
  for (auto v : {Verdict::kAnswerable, Verdict::kUnanswerable, Verdict::kNoConsensus}) {
    if (to_string(v) == text) return v;
  }
  throw Error("unknown consensus label '" + std::string(text) + "'");
}

nlohmann::json to_json(const AnnotationTask& task) {
  nlohmann::json exemplars = nlohmann::json::array();
  for (const auto& e : task.exemplars) {
    exemplars.push_back({{"image", e.image_ref}, {"question", e.question}, {"reason", code(e.reason)}});
  }
  nlohmann::json options = nlohmann::json::array();
  for (const auto& o : task.options) options.push_back({{"text", o.text}, {"source", to_string(o.source)}});
  return {{"task_id", task.task_id},
          {"source_id", task.source_id},
          {"kind", to_string(task.kind)},
          {"image", task.image_ref},
          {"question", task.question},
          {"question_type", task.question_type},
          {"answer_type", to_string(task.answer_type)},
          {"exemplars", exemplars},
          {"options", options}};
}

AnnotationTask task_from_json(const nlohmann::json& j) {
  AnnotationTask t;
  t.task_id = j.at("task_id").get<std::string>();
  t.source_id = j.at("source_id").get<std::string>();
  t.kind = parse_perturbation_kind(j.at("kind").get<std::string>());
  t.image_ref = j.at("image").get<std::string>();
  t.question = j.at("question").get<std::string>();
  t.question_type = j.value("question_type", "");
  t.answer_type = parse_answer_type(j.value("answer_type", "other"));
  for (const auto& e : j.value("exemplars", nlohmann::json::array())) {
    t.exemplars.push_back({e.at("image").get<std::string>(), e.at("question").get<std::string>(),
                           parse_reason(e.at("reason").get<std::string>())});
  }
  const auto& options = j.at("options");
  if (!options.is_array() || options.size() != 3) throw Error("task needs exactly 3 options");
  for (std::size_t i = 0; i < 3; ++i) {
    t.options[i] = {options[i].at("text").get<std::string>(),
                    parse_option_source(options[i].at("source").get<std::string>())};
  }
  return t;
}

nlohmann::json to_json(const AnnotatorResponse& r) {
  nlohmann::json j = {{"task_id", r.task_id},
                      {"worker_id", r.worker_id},
                      {"answerable", r.answerable},
                      {"reason", nullptr},
                      {"unanswerable_answer", nullptr},
                      {"altered_element", nullptr},
                      {"chosen_answer", nullptr},
                      {"confidence", r.confidence}};
  if (r.reason) j["reason"] = code(*r.reason);
  if (r.refusal) j["unanswerable_answer"] = code(*r.refusal);
  if (r.altered_element) j["altered_element"] = to_string(*r.altered_element);
  if (r.chosen_answer) j["chosen_answer"] = to_string(*r.chosen_answer);
  return j;
}

AnnotatorResponse response_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("response must be a JSON object");
  auto opt = [&j](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  };
  AnnotatorResponse r;
  r.task_id = j.at("task_id").get<std::string>();
  r.worker_id = j.at("worker_id").get<std::string>();
  r.answerable = j.at("answerable").get<bool>();
  if (auto v = opt("reason")) r.reason = parse_reason(*v);
  if (auto v = opt("unanswerable_answer")) r.refusal = parse_refusal(*v);
  if (auto v = opt("altered_element")) r.altered_element = parse_altered_element(*v);
  if (auto v = opt("chosen_answer")) r.chosen_answer = parse_option_source(*v);
  r.confidence = j.at("confidence").get<int>();
  validate(r);
  return r;
}

nlohmann::json to_json(const ConsensusLabel& label) {
  return {{"task_id", label.task_id},
          {"label", to_string(label.label)},
          {"votes", {{"answerable", label.answerable_votes}, {"unanswerable", label.unanswerable_votes}}},
          {"mean_confidence", label.mean_confidence}};
}

}  // namespace abstain::annotation
