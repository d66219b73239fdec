// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/core/types.hpp"
#include "abstain/image/backends.hpp"
#include "abstain/text/backends.hpp"

namespace abstain::image {

using LabelSet = std::set<std::string>;

/// Lowercased, singularized concept tokens of a question and its answers.
struct ConceptSet {
  LabelSet concepts;
};

/// Canonical matching form of a label or concept: lowercase, each word singularized.
std::string normalize_label(std::string_view label);

/// Question nouns plus every answer word (articles dropped). Numeric answers
/// stay as tokens such as "2".
ConceptSet extract_concepts(std::string_view question, std::span<const std::string> answers,
                            const text::PosTagger& tagger);

struct OverlapScore {
  double value = 0.0;
  double alpha = 1.0;
};

inline constexpr double kDefaultAlpha = 1.0;
inline constexpr std::size_t kDefaultTopN = 50;
inline constexpr double kDefaultMinDetectionScore = 0.5;

/// s = alpha * |O_a n O_c| / |O_c| + |C n O_c| / |O_c| for anchor objects O_a,
/// candidate objects O_c and concepts C. Throws abstain::Error
/// ("undefined score") when O_c is empty.
OverlapScore overlap_score(const LabelSet& anchor_objects, const LabelSet& candidate_objects,
                           const ConceptSet& concepts, double alpha = kDefaultAlpha);

struct RankedCandidate {
  std::string image_ref;
  double similarity = 0.0;
};

/// Top-n pool entries by cosine similarity to `anchor`, descending, ties by
/// image_ref. Pool entries with the anchor's ref are skipped.
std::vector<RankedCandidate> rank_candidates(const ImageEmbedding& anchor,
                                             std::span<const ImageEmbedding> pool,
                                             std::size_t n = kDefaultTopN);

/// Normalized labels of objects scoring at least `min_score`.
LabelSet object_labels(const ObjectDetection& detection,
                       double min_score = kDefaultMinDetectionScore);

struct SelectedReplacement {
  std::string image_ref;
  OverlapScore score;
  std::size_t rank = 0;  // index into the ranked candidate list
};

/// Argmin of the overlap score over candidates with a non-empty object set;
/// ties go to the earlier (more similar) candidate. Throws abstain::Error when
/// every candidate is undefined.
SelectedReplacement select_replacement(const VqaInstance& anchor,
                                       std::span<const RankedCandidate> candidates,
                                       const std::map<std::string, ObjectDetection>& detections,
                                       const ConceptSet& concepts, double alpha = kDefaultAlpha,
                                       double min_score = kDefaultMinDetectionScore);

/// Objects whose label (or its head word) matches a concept after
/// singular/plural normalization, strongest detection first.
std::vector<DetectedObject> relevant_objects(const ObjectDetection& detection,
                                             const ConceptSet& concepts,
                                             double min_score = kDefaultMinDetectionScore);

}  // namespace abstain::image
