// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abstain/core/types.hpp"
#include "abstain/text/backends.hpp"
#include "abstain/text/embedding_table.hpp"
#include "abstain/text/word_replace.hpp"

namespace abstain {

/// A perturbation step that produced nothing for an instance, and why.
struct SkipEntry {
  std::string source_id;
  std::string stage;
  std::string reason;
};

struct PerturbOutcome {
  std::vector<PerturbationRecord> records;
  std::vector<SkipEntry> skips;
};

}  // namespace abstain

namespace abstain::text {

struct TextPerturbConfig {
  double epsilon = kDefaultEpsilon;
  double negation_epsilon = kDefaultEpsilon;
  std::size_t neighbors = 5;
  bool word_replace = true;
  bool negation = true;
};

struct TextBackends {
  const PosTagger& tagger;
  const DependencyParser& parser;
  const LmScorer& scorer;
  const EmbeddingTable& embeddings;
};

/// T-1 records for every replacement surviving the LM filter plus at most one
/// T-2 record. Expects an instance that already passed the binary filter.
PerturbOutcome perturb_text(const VqaInstance& instance, const TextPerturbConfig& config,
                            const TextBackends& backends);

}  // namespace abstain::text
