// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/image/replacement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/tokenize.hpp"

namespace abstain::image {

std::string normalize_label(std::string_view label) {
  std::istringstream words{to_lower(label)};
  std::string word, out;
  while (words >> word) {
    if (!out.empty()) out += ' ';
    out += singularize(word);
  }
  return out;
}

ConceptSet extract_concepts(std::string_view question, std::span<const std::string> answers,
                            const text::PosTagger& tagger) {
  ConceptSet out;
  for (const auto& t : tagger.tag(question)) {
    if (text::is_noun_tag(t.tag) && !is_question_word(t.text)) {
      out.concepts.insert(normalize_label(t.text));
    }
  }
  for (const auto& answer : answers) {
    for (const auto& tok : tokenize(answer)) {
      const auto word = to_lower(tok.text);
      if (tok.length == 1 && !std::isalnum(static_cast<unsigned char>(tok.text[0]))) continue;
      if (word == "a" || word == "an" || word == "the") continue;
      out.concepts.insert(normalize_label(word));
    }
  }
  return out;
}

OverlapScore overlap_score(const LabelSet& anchor_objects, const LabelSet& candidate_objects,
                           const ConceptSet& concepts, double alpha) {
  if (candidate_objects.empty()) throw Error("undefined score: candidate has no objects");
  std::size_t shared_objects = 0, shared_concepts = 0;
  for (const auto& o : candidate_objects) {
    shared_objects += anchor_objects.contains(o);
    shared_concepts += concepts.concepts.contains(o);
  }
  const double n = static_cast<double>(candidate_objects.size());
  return {alpha * static_cast<double>(shared_objects) / n + static_cast<double>(shared_concepts) / n,
          alpha};
}

std::vector<RankedCandidate> rank_candidates(const ImageEmbedding& anchor,
                                             std::span<const ImageEmbedding> pool, std::size_t n) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(pool.size());
  for (const auto& e : pool) {
    if (e.image_ref == anchor.image_ref) continue;
    if (e.vector.size() != anchor.vector.size()) {
      throw Error("embedding dimension mismatch for '" + e.image_ref + "'");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < e.vector.size(); ++i) {
      dot += static_cast<double>(e.vector[i]) * anchor.vector[i];
    }
    ranked.push_back({e.image_ref, dot});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.image_ref < b.image_ref;
  });
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

LabelSet object_labels(const ObjectDetection& detection, double min_score) {
  LabelSet out;
  for (const auto& o : detection.objects) {
    if (o.score >= min_score) out.insert(normalize_label(o.label));
  }
  return out;
}

SelectedReplacement select_replacement(const VqaInstance& anchor,
                                       std::span<const RankedCandidate> candidates,
                                       const std::map<std::string, ObjectDetection>& detections,
                                       const ConceptSet& concepts, double alpha,
                                       double min_score) {
  LabelSet anchor_objects;
  if (auto it = detections.find(anchor.image_ref); it != detections.end()) {
    anchor_objects = object_labels(it->second, min_score);
  }
  std::optional<SelectedReplacement> best;
  for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
    auto it = detections.find(candidates[rank].image_ref);
    if (it == detections.end()) continue;
    const auto objects = object_labels(it->second, min_score);
    if (objects.empty()) continue;
    const auto score = overlap_score(anchor_objects, objects, concepts, alpha);
    if (!best || score.value < best->score.value) {
      best = SelectedReplacement{candidates[rank].image_ref, score, rank};
    }
  }
  if (!best) throw Error("no candidate with a defined overlap score");
  return *best;
}

std::vector<DetectedObject> relevant_objects(const ObjectDetection& detection,
                                             const ConceptSet& concepts, double min_score) {
  std::vector<DetectedObject> out;
  for (const auto& o : detection.objects) {
    if (o.score < min_score) continue;
    const auto label = normalize_label(o.label);
    const auto head = label.substr(label.rfind(' ') == std::string::npos ? 0 : label.rfind(' ') + 1);
    if (concepts.concepts.contains(label) || concepts.concepts.contains(head)) out.push_back(o);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

}  // namespace abstain::image
