// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "abstain/eval/prompt.hpp"

namespace abstain::eval {

enum class VerdictKind { kAnswerable, kUnanswerable, kChoice, kFreeText, kOutOfScope };

std::string_view to_string(VerdictKind kind);

struct ParsedResponse {
  VerdictKind verdict = VerdictKind::kOutOfScope;
  int choice = -1;   // 0..3 for kChoice
  std::string text;  // normalized free text, or the chosen option's text
  std::string raw;
};

/// Bump together with kRefusalLexicon and note the change in CHANGELOG.md.
inline constexpr int kRefusalLexiconVersion = 1;

/// Normalized phrases that turn an open-ended reply into "unanswerable".
std::span<const std::string_view> refusal_lexicon();

/// True when the normalized reply contains a lexicon phrase as whole words.
bool is_refusal(std::string_view normalized);

/// BY: "unanswerable" is searched before "answerable" (case-insensitive).
/// MC: a leading option letter, else a unique option-text match.
/// OE/OEH: normalized text, "unanswerable" when it hits the refusal lexicon.
/// Anything else is out-of-scope.
ParsedResponse parse_response(std::string_view raw, Protocol protocol,
                              const std::optional<McOptions>& options = std::nullopt);

}  // namespace abstain::eval
