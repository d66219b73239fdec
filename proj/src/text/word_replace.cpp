// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/text/word_replace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/tokenize.hpp"

namespace abstain::text {

std::vector<TaggedToken> detect_nouns(std::string_view question, const PosTagger& tagger) {
  if (question.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error("detect_nouns: empty question");
  }
  std::vector<TaggedToken> nouns;
  for (auto& t : tagger.tag(question)) {
    if (is_noun_tag(t.tag)) nouns.push_back(std::move(t));
  }
  return nouns;
}

TaggedToken select_anchor(std::span<const TaggedToken> nouns, std::span<const std::string> answers) {
  std::set<std::string> answer_set;
  for (const auto& a : answers) answer_set.insert(normalize_answer(a));
  for (auto it = nouns.rbegin(); it != nouns.rend(); ++it) {
    if (is_question_word(it->text)) continue;
    if (answer_set.contains(normalize_answer(it->text))) continue;
    return *it;
  }
  throw SkipError("no anchor");
}

std::vector<std::string> nearest_neighbors(std::string_view anchor, const EmbeddingTable& table,
                                           std::size_t k) {
  const auto anchor_vec = table.find(anchor);
  if (!anchor_vec) throw SkipError("anchor '" + std::string(anchor) + "' out of vocabulary");
  if (k == 0) return {};

  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(table.size());
  for (const auto& token : table.vocabulary()) {
    if (token == anchor) continue;
    scored.emplace_back(cosine_similarity(*anchor_vec, *table.find(token)), &token);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return *a.second < *b.second;
  };
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(*scored[i].second);
  return out;
}

std::vector<std::string> dedup_lexical(std::string_view anchor,
                                       std::span<const std::string> candidates) {
  std::set<std::string> seen = {lexical_key(anchor)};
  std::vector<std::string> out;
  for (const auto& c : candidates) {
    if (seen.insert(lexical_key(c)).second) out.push_back(c);
  }
  return out;
}

std::vector<ReplacementCandidate> generate_replacements(std::string_view question,
                                                        const TaggedToken& anchor,
                                                        std::span<const std::string> replacements) {
  if (anchor.offset + anchor.length > question.size() ||
      question.substr(anchor.offset, anchor.length) != anchor.text) {
    throw Error("anchor '" + anchor.text + "' not found at position " +
                std::to_string(anchor.position));
  }
  const Token slot{anchor.text, anchor.offset, anchor.length};
  const bool capitalize = anchor.position == 0 && !anchor.text.empty() &&
                          std::isupper(static_cast<unsigned char>(anchor.text[0]));
  std::vector<ReplacementCandidate> out;
  out.reserve(replacements.size());
  for (const auto& r : replacements) {
    std::string word = r;
    if (capitalize && !word.empty()) {
      word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    }
    out.push_back({anchor.text, r, splice(question, slot, word), 0.0, false});
  }
  return out;
}

FilterResult filter_by_perplexity(std::string_view original,
                                  std::span<const ReplacementCandidate> candidates,
                                  const LmScorer& scorer, double epsilon) {
  if (!std::isfinite(epsilon)) throw Error("filter_by_perplexity: epsilon must be finite");
  FilterResult result;
  result.scored.assign(candidates.begin(), candidates.end());

  double base = 0.0;
  try {
    base = scorer.score(original);
  } catch (const std::exception& e) {
    for (auto& c : result.scored) {
      c.scored = false;
      result.dropped.push_back("'" + c.candidate_question + "': original unscorable: " + e.what());
    }
    return result;
  }

  for (auto& c : result.scored) {
    try {
      c.lm_delta = scorer.score(c.candidate_question) - base;
      c.scored = true;
    } catch (const std::exception& e) {
      c.scored = false;
      result.dropped.push_back("'" + c.candidate_question + "': " + e.what());
      continue;
    }
    // NaN compares false and is dropped with the rest.
    if (c.lm_delta <= epsilon) result.kept.push_back(c);
  }
  return result;
}

}  // namespace abstain::text
