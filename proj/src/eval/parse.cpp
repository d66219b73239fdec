// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/eval/parse.hpp"

#include <array>
#include <cctype>

#include "abstain/core/lexical.hpp"

namespace abstain::eval {
namespace {

constexpr std::array<std::string_view, 5> kRefusalLexicon = {
    "unanswerable", "i cannot answer", "i don't know", "i do not know", "not sure"};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Occurrence of `needle` in `haystack` bounded by non-word characters.
bool contains_phrase(std::string_view haystack, std::string_view needle) {
  for (auto at = haystack.find(needle); at != std::string_view::npos;
       at = haystack.find(needle, at + 1)) {
    const bool left = at == 0 || !word_char(haystack[at - 1]);
    const auto end = at + needle.size();
    const bool right = end == haystack.size() || !word_char(haystack[end]);
    if (left && right) return true;
  }
  return false;
}

std::string unify_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK
    if (text.compare(i, 3, "\xE2\x80\x99") == 0) {
      out += '\'';
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

ParsedResponse parse_mc(std::string_view raw, const std::optional<McOptions>& options) {
  ParsedResponse out;
  const auto body = trim(raw);
  auto strip = body;
  if (!strip.empty() && strip.front() == '(') strip.remove_prefix(1);
  if (!strip.empty() && strip.front() >= 'A' && strip.front() <= 'D') {
    const bool bounded = strip.size() == 1 || strip[1] == '.' || strip[1] == ')' ||
                         strip[1] == ':' || strip[1] == ',' ||
                         std::isspace(static_cast<unsigned char>(strip[1])) != 0;
    // "A dog" is an article, not a letter.
    const bool article = strip.front() == 'A' && strip.size() > 1 &&
                         std::isspace(static_cast<unsigned char>(strip[1])) != 0;
    if (bounded && !article) {
      out.verdict = VerdictKind::kChoice;
      out.choice = strip.front() - 'A';
      if (options) out.text = (*options)[static_cast<std::size_t>(out.choice)];
      return out;
    }
  }
  if (!options) return out;
  const auto reply = normalize_open_answer(unify_quotes(body));
  if (reply.empty()) return out;
  int exact = -1;
  int exact_count = 0;
  int contained = -1;
  int contained_count = 0;
  for (int i = 0; i < 4; ++i) {
    const auto option = normalize_open_answer((*options)[static_cast<std::size_t>(i)]);
    if (option.empty()) continue;
    if (option == reply) {
      exact = i;
      ++exact_count;
    } else if (contains_phrase(reply, option)) {
      contained = i;
      ++contained_count;
    }
  }
  const int pick = exact_count == 1 ? exact : (exact_count == 0 && contained_count == 1 ? contained : -1);
  if (pick >= 0) {
    out.verdict = VerdictKind::kChoice;
    out.choice = pick;
    out.text = (*options)[static_cast<std::size_t>(pick)];
  }
  return out;
}

}  // namespace

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kAnswerable: return "answerable";
    case VerdictKind::kUnanswerable: return "unanswerable";
    case VerdictKind::kChoice: return "choice";
    case VerdictKind::kFreeText: return "free-text";
    case VerdictKind::kOutOfScope: return "out-of-scope";
  }
  return "?";
}

std::span<const std::string_view> refusal_lexicon() { return kRefusalLexicon; }

bool is_refusal(std::string_view normalized) {
  for (auto phrase : kRefusalLexicon) {
    if (contains_phrase(normalized, phrase)) return true;
  }
  return false;
}

ParsedResponse parse_response(std::string_view raw, Protocol protocol,
                              const std::optional<McOptions>& options) {
  ParsedResponse out;
  switch (protocol) {
    case Protocol::kBY: {
      const auto lower = to_lower(raw);
      if (lower.find("unanswerable") != std::string::npos) {
        out.verdict = VerdictKind::kUnanswerable;
        out.text = "unanswerable";
      } else if (lower.find("answerable") != std::string::npos) {
        out.verdict = VerdictKind::kAnswerable;
        out.text = "answerable";
      }
      break;
    }
    case Protocol::kMC:
      out = parse_mc(raw, options);
      break;
    case Protocol::kOE:
    case Protocol::kOEH: {
      auto text = normalize_open_answer(unify_quotes(trim(raw)));
      if (text.empty()) break;
      if (is_refusal(text)) {
        out.verdict = VerdictKind::kUnanswerable;
        out.text = "unanswerable";
      } else {
        out.verdict = VerdictKind::kFreeText;
        out.text = std::move(text);
      }
      break;
    }
  }
  out.raw = std::string(raw);
  return out;
}

}  // namespace abstain::eval
