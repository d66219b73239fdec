// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace abstain {

/// A token and the byte range it occupies in the source text.
struct Token {
  std::string text;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Words (letters, digits, inner apostrophes and hyphens) and single
/// punctuation characters. Whitespace is dropped; non-ASCII bytes are word
/// characters so UTF-8 words stay intact.
std::vector<Token> tokenize(std::string_view text);

/// "isn't" -> "is not", "can't" -> "can not", "won't" -> "will not", ...
std::string expand_contractions(std::string_view text);

/// Replaces the bytes of `token` in `text` with `replacement`.
std::string splice(std::string_view text, const Token& token, std::string_view replacement);

}  // namespace abstain
