// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/text/perturb_text.hpp"

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/text/negation.hpp"

namespace abstain::text {
namespace {

void word_replace(const VqaInstance& instance, const TextPerturbConfig& config,
                  const TextBackends& backends, PerturbOutcome& out) {
  const auto nouns = detect_nouns(instance.question, backends.tagger);
  const auto anchor = select_anchor(nouns, instance.answers);
  const auto neighbors =
      nearest_neighbors(to_lower(anchor.text), backends.embeddings, config.neighbors);
  const auto replacements = dedup_lexical(to_lower(anchor.text), neighbors);
  if (replacements.empty()) throw SkipError("no replacement survived lexical dedup");

  const auto candidates = generate_replacements(instance.question, anchor, replacements);
  const auto filtered =
      filter_by_perplexity(instance.question, candidates, backends.scorer, config.epsilon);
  for (const auto& reason : filtered.dropped) {
    out.skips.push_back({instance.id, "T1_word_replace", "scorer failure: " + reason});
  }
  if (filtered.kept.empty() && filtered.dropped.empty()) {
    out.skips.push_back({instance.id, "T1_word_replace", "all candidates exceed epsilon"});
  }

  for (const auto& c : filtered.kept) {
    std::size_t rank = 0;
    while (rank < neighbors.size() && neighbors[rank] != c.replacement) ++rank;
    PerturbationRecord r;
    r.source_id = instance.id;
    r.kind = PerturbationKind::kWordReplace;
    r.perturbed_question = c.candidate_question;
    r.params = {
        {"anchor", c.anchor},
        {"anchor_position", anchor.position},
        {"replacement", c.replacement},
        {"neighbor_rank", rank},
        {"k", config.neighbors},
        {"epsilon", config.epsilon},
        {"lm_delta", c.lm_delta},
    };
    out.records.push_back(std::move(r));
  }
}

void negation(const VqaInstance& instance, const TextPerturbConfig& config,
              const TextBackends& backends, PerturbOutcome& out) {
  const auto negated = negate_question(instance.question, backends.parser);
  if (!negated.question) {
    out.skips.push_back({instance.id, "T2_negation", negated.reason});
    return;
  }
  const ReplacementCandidate candidate{"", "", *negated.question, 0.0, false};
  const auto filtered = filter_by_perplexity(instance.question, std::span(&candidate, 1),
                                             backends.scorer, config.negation_epsilon);
  if (filtered.kept.empty()) {
    out.skips.push_back({instance.id, "T2_negation",
                         filtered.dropped.empty() ? "negated question exceeds epsilon"
                                                  : "scorer failure: " + filtered.dropped.front()});
    return;
  }
  PerturbationRecord r;
  r.source_id = instance.id;
  r.kind = PerturbationKind::kNegation;
  r.perturbed_question = *negated.question;
  r.params = {
      {"rule", to_string(*negated.rule)},
      {"epsilon", config.negation_epsilon},
      {"lm_delta", filtered.kept.front().lm_delta},
  };
  out.records.push_back(std::move(r));
}

}  // namespace

PerturbOutcome perturb_text(const VqaInstance& instance, const TextPerturbConfig& config,
                            const TextBackends& backends) {
  PerturbOutcome out;
  if (config.word_replace) {
    try {
      word_replace(instance, config, backends, out);
    } catch (const Error& e) {
      out.skips.push_back({instance.id, "T1_word_replace", e.what()});
    }
  }
  if (config.negation) {
    try {
      negation(instance, config, backends, out);
    } catch (const Error& e) {
      out.skips.push_back({instance.id, "T2_negation", e.what()});
    }
  }
  return out;
}

}  // namespace abstain::text
