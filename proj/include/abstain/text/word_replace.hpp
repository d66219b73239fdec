// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/text/backends.hpp"
#include "abstain/text/embedding_table.hpp"

namespace abstain::text {

/// Noun tokens of `question` in sentence order. Throws abstain::Error on an
/// empty question.
std::vector<TaggedToken> detect_nouns(std::string_view question, const PosTagger& tagger);

/// The last noun that is neither a question word nor equal to one of the
/// ground-truth answers. Throws SkipError("no anchor") when none is left.
TaggedToken select_anchor(std::span<const TaggedToken> nouns,
                          std::span<const std::string> answers = {});

/// The k tokens most cosine-similar to `anchor`, excluding the anchor, in
/// descending similarity with lexicographic tie-break. Throws SkipError when
/// the anchor is out of vocabulary.
std::vector<std::string> nearest_neighbors(std::string_view anchor, const EmbeddingTable& table,
                                           std::size_t k);

/// Drops candidates that are plural/tense variants of the anchor and later
/// candidates that are variants of an earlier one (exact duplicates
/// included). Order is preserved.
std::vector<std::string> dedup_lexical(std::string_view anchor,
                                       std::span<const std::string> candidates);

struct ReplacementCandidate {
  std::string anchor;
  std::string replacement;
  std::string candidate_question;
  double lm_delta = 0.0;  // LM(candidate) - LM(original), set by the filter
  bool scored = false;
};

/// Rewrites only the anchor occurrence at `anchor.position`. A capitalized
/// sentence-initial anchor yields a capitalized replacement.
std::vector<ReplacementCandidate> generate_replacements(std::string_view question,
                                                        const TaggedToken& anchor,
                                                        std::span<const std::string> replacements);

struct FilterResult {
  std::vector<ReplacementCandidate> scored;  // every input, lm_delta filled when scorable
  std::vector<ReplacementCandidate> kept;    // lm_delta <= epsilon
  std::vector<std::string> dropped;          // one reason per scorer failure
};

inline constexpr double kDefaultEpsilon = 0.4;

/// Keeps exactly the candidates with LM(Q') - LM(Q) <= epsilon.
FilterResult filter_by_perplexity(std::string_view original,
                                  std::span<const ReplacementCandidate> candidates,
                                  const LmScorer& scorer, double epsilon = kDefaultEpsilon);

}  // namespace abstain::text
