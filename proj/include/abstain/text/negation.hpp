// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "abstain/text/backends.hpp"

namespace abstain::text {

enum class NegationRule { kAuxiliary, kDoSupport, kRemoveNegation };

std::string_view to_string(NegationRule rule);

struct NegationOutcome {
  std::optional<std::string> question;
  std::optional<NegationRule> rule;
  std::string reason;  // why nothing was produced
};

/// Negates a question with three ordered rules, after expanding contractions:
///   auxiliary  - "not" after the copula/auxiliary, or before the participle
///                or base verb it governs ("What is the man not holding?");
///   do-support - a bare main verb becomes "did/does/do not <lemma>";
///   remove     - when the clause is already negated, its negation keywords
///                (not, hardly, never) are removed instead.
/// The first two only fire on clauses without a negation keyword.
NegationOutcome negate_question(std::string_view question, const DependencyParser& parser);

}  // namespace abstain::text
