// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/core/tokenize.hpp"

#include <cctype>

#include "abstain/core/lexical.hpp"

namespace abstain {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!is_word_byte(c)) {
      out.push_back({std::string(1, text[i]), i, 1});
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size()) {
      const auto d = static_cast<unsigned char>(text[i]);
      if (is_word_byte(d)) {
        ++i;
      } else if ((d == '\'' || d == '-') && i + 1 < text.size() &&
                 is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        i += 2;
      } else {
        break;
      }
    }
    out.push_back({std::string(text.substr(start, i - start)), start, i - start});
  }
  return out;
}

std::string expand_contractions(std::string_view text) {
  std::string normalized;
  normalized.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2019 right single quotation mark
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      normalized += '\'';
      i += 2;
    } else {
      normalized += text[i];
    }
  }

  std::string out;
  std::size_t cursor = 0;
  for (const auto& tok : tokenize(normalized)) {
    const auto lower = to_lower(tok.text);
    std::string expanded;
    if (lower == "can't" || lower == "cannot") {
      expanded = tok.text.substr(0, 2) + "n not";
    } else if (lower == "won't") {
      expanded = std::string(1, tok.text[0]) + "ill not";
    } else if (lower == "shan't") {
      expanded = tok.text.substr(0, 3) + "ll not";
    } else if (lower.size() > 3 && lower.ends_with("n't")) {
      expanded = tok.text.substr(0, tok.text.size() - 3) + " not";
    } else {
      continue;
    }
    out.append(normalized, cursor, tok.offset - cursor);
    out += expanded;
    cursor = tok.offset + tok.length;
  }
  out.append(normalized, cursor, std::string::npos);
  return out;
}

std::string splice(std::string_view text, const Token& token, std::string_view replacement) {
  std::string out;
  out.reserve(text.size() + replacement.size());
  out.append(text.substr(0, token.offset));
  out.append(replacement);
  out.append(text.substr(token.offset + token.length));
  return out;
}

}  // namespace abstain
