// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/eval/prompt.hpp"

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"

namespace abstain::eval {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::kBY: return "BY";
    case Protocol::kMC: return "MC";
    case Protocol::kOE: return "OE";
    case Protocol::kOEH: return "OEH";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "BY" || text == "by") return Protocol::kBY;
  if (text == "MC" || text == "mc") return Protocol::kMC;
  if (text == "OE" || text == "oe") return Protocol::kOE;
  if (text == "OEH" || text == "oeh") return Protocol::kOEH;
  throw Error("unknown protocol '" + std::string(text) + "'");
}

std::string build_prompt(std::string_view question, Protocol protocol,
                         const std::optional<McOptions>& options,
                         std::optional<annotation::Reason> hint) {
  if (question.empty()) throw Error("build_prompt: empty question");
  if (options.has_value() != (protocol == Protocol::kMC)) {
    throw Error("build_prompt: options are required for MC and only for MC");
  }
  if (hint.has_value() != (protocol == Protocol::kOEH)) {
    throw Error("build_prompt: a hint is required for OEH and only for OEH");
  }
  std::string q(question);
  switch (protocol) {
    case Protocol::kBY:
      return "Question: Given the question that " + q +
             ", is the above question answerable or unanswerable based on the image?";
    case Protocol::kMC: {
      std::string out = q + "\n\nOptions:\n";
      const char letters[] = {'A', 'B', 'C', 'D'};
      for (std::size_t i = 0; i < 4; ++i) {
        if ((*options)[i].empty()) throw Error("build_prompt: empty MC option");
        out += letters[i];
        out += ". " + (*options)[i] + "\n";
      }
      return out + "\nThe answer is: A/B/C/D.";
    }
    case Protocol::kOE:
      return q;
    case Protocol::kOEH:
      return q + " If you feel it " + std::string(annotation::description(*hint)) +
             ", you can simply reply ``unanswerable''.";
  }
  throw Error("build_prompt: unknown protocol");
}

FewShotPrompt assemble_few_shot(std::string_view prompt, const ShotConfig& shots,
                                std::span<const ShotExemplar> pool, std::string_view query_id) {
  if (shots.n_answerable < 0 || shots.n_unanswerable < 0) {
    throw Error("assemble_few_shot: negative shot count");
  }
  FewShotPrompt out;
  if (shots.total() == 0) {
    out.text = std::string(prompt);
    return out;
  }
  std::vector<const ShotExemplar*> answerable;
  std::vector<const ShotExemplar*> unanswerable;
  for (const auto& ex : pool) {
    if (!query_id.empty() && ex.id == query_id) continue;
    (ex.answerable ? answerable : unanswerable).push_back(&ex);
  }
  if (answerable.size() < static_cast<std::size_t>(shots.n_answerable) ||
      unanswerable.size() < static_cast<std::size_t>(shots.n_unanswerable)) {
    throw Error("assemble_few_shot: pool has " + std::to_string(answerable.size()) +
                " answerable / " + std::to_string(unanswerable.size()) +
                " unanswerable exemplars, need " + std::to_string(shots.n_answerable) + " / " +
                std::to_string(shots.n_unanswerable));
  }
  Rng rng(derive_seed(shots.seed, query_id));
  seeded_shuffle(std::span<const ShotExemplar*>(answerable), rng);
  seeded_shuffle(std::span<const ShotExemplar*>(unanswerable), rng);
  std::vector<const ShotExemplar*> chosen(answerable.begin(),
                                          answerable.begin() + shots.n_answerable);
  chosen.insert(chosen.end(), unanswerable.begin(), unanswerable.begin() + shots.n_unanswerable);
  seeded_shuffle(std::span<const ShotExemplar*>(chosen), rng);

  for (const auto* ex : chosen) {
    out.text += ex->prompt + "\nAnswer: " + ex->gold + "\n\n";
    out.exemplar_ids.push_back(ex->id);
  }
  out.text += prompt;
  out.n_answerable = shots.n_answerable;
  out.n_unanswerable = shots.n_unanswerable;
  return out;
}

}  // namespace abstain::eval
