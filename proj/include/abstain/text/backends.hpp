// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace abstain::text {

/// A token with its Penn-style part-of-speech tag, its index in the sentence
/// and its byte range in the tagged text.
struct TaggedToken {
  std::string text;
  std::string tag;
  std::size_t position = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

bool is_noun_tag(std::string_view tag);
bool is_verb_tag(std::string_view tag);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<TaggedToken> tag(std::string_view text) const = 0;
};

/// Lexicon plus suffix and context rules. Good enough for short VQA
/// questions; entries from a "word<TAB>TAG" table take precedence over the
/// built-in lexicon.
class RuleTagger final : public PosTagger {
 public:
  RuleTagger();
  static RuleTagger from_table(const std::filesystem::path& path);

  void set(std::string word, std::string tag);
  std::vector<TaggedToken> tag(std::string_view text) const override;

 private:
  std::unordered_map<std::string, std::string> overrides_;
};

struct VerbToken {
  std::size_t position = 0;
  std::string lemma;
  std::string tag;
};

/// Shallow dependency view of a question: the text it was computed on (after
/// contraction expansion), its tokens, and which tokens are main verbs,
/// auxiliaries/copulas and negation keywords.
struct ClauseParse {
  std::string text;
  std::vector<TaggedToken> tokens;
  std::vector<VerbToken> verbs;
  std::vector<VerbToken> auxiliaries;
  std::vector<std::size_t> negations;
};

class DependencyParser {
 public:
  virtual ~DependencyParser() = default;
  virtual ClauseParse parse(std::string_view text) const = 0;
};

/// Builds a ClauseParse from a PosTagger's output with lexical rules.
class RuleDependencyParser final : public DependencyParser {
 public:
  explicit RuleDependencyParser(const PosTagger& tagger) : tagger_(tagger) {}
  ClauseParse parse(std::string_view text) const override;

 private:
  const PosTagger& tagger_;
};

bool is_negation_keyword(std::string_view word);

/// Total negative log-likelihood of a sentence, -sum_i log p(w_i | w_<i).
/// Implementations throw abstain::Error when they cannot score a text.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  virtual double score(std::string_view text) const = 0;
};

/// Exact sentence -> NLL table ("sentence<TAB>nll" rows). Unknown sentences
/// throw, so callers drop them instead of keeping them.
class LookupLmScorer final : public LmScorer {
 public:
  LookupLmScorer() = default;
  static LookupLmScorer from_table(const std::filesystem::path& path);

  void set(std::string sentence, double nll);
  double score(std::string_view text) const override;

 private:
  std::unordered_map<std::string, double> table_;
};

/// Context-free unigram model: sums -log p(token) over lowercased tokens,
/// with `floor_probability` for tokens missing from the table.
class UnigramLmScorer final : public LmScorer {
 public:
  explicit UnigramLmScorer(double floor_probability = 1e-6);
  static UnigramLmScorer from_table(const std::filesystem::path& path,
                                    double floor_probability = 1e-6);

  void set(std::string token, double probability);
  double score(std::string_view text) const override;

 private:
  double floor_;
  std::unordered_map<std::string, double> probs_;
};

}  // namespace abstain::text
