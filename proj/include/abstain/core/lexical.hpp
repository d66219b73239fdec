// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace abstain {

std::string to_lower(std::string_view text);

/// Lowercase, then trim surrounding whitespace and punctuation.
std::string normalize_answer(std::string_view text);

/// Matching form for open answers: lowercase, drop the articles a/an/the,
/// drop terminal punctuation, collapse whitespace.
std::string normalize_open_answer(std::string_view text);

/// Plural -> singular with a small irregular table ("mice" -> "mouse").
std::string singularize(std::string_view word);

/// Inflected verb -> base form ("threw" -> "throw", "holding" -> "hold").
std::string verb_lemma(std::string_view word);

/// Collapses plural and tense variants onto one key; used to decide whether
/// two words are lexical duplicates of each other.
std::string lexical_key(std::string_view word);

bool is_question_word(std::string_view word);

}  // namespace abstain
