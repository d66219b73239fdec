// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/text/negation.hpp"

#include <algorithm>
#include <cctype>

#include "abstain/core/tokenize.hpp"

namespace abstain::text {
namespace {

std::string insert_before(const std::string& text, std::size_t offset, std::string_view word) {
  return text.substr(0, offset) + std::string(word) + " " + text.substr(offset);
}

std::string insert_after(const std::string& text, std::size_t end, std::string_view word) {
  return text.substr(0, end) + " " + std::string(word) + text.substr(end);
}

}  // namespace

std::string_view to_string(NegationRule rule) {
  switch (rule) {
    case NegationRule::kAuxiliary: return "auxiliary";
    case NegationRule::kDoSupport: return "do-support";
    case NegationRule::kRemoveNegation: return "remove-negation";
  }
  return "auxiliary";
}

NegationOutcome negate_question(std::string_view question, const DependencyParser& parser) {
  ClauseParse parse;
  try {
    parse = parser.parse(question);
  } catch (const std::exception& e) {
    return {std::nullopt, std::nullopt, std::string("parser failure: ") + e.what()};
  }
  const auto& text = parse.text;
  const auto& tokens = parse.tokens;

  if (!parse.negations.empty()) {
    // Remove back to front so earlier offsets stay valid; each keyword takes
    // the whitespace in front of it along.
    std::string out = text;
    for (auto it = parse.negations.rbegin(); it != parse.negations.rend(); ++it) {
      const auto& t = tokens[*it];
      std::size_t begin = t.offset;
      std::size_t end = t.offset + t.length;
      if (begin > 0 && out[begin - 1] == ' ') {
        --begin;
      } else if (end < out.size() && out[end] == ' ') {
        ++end;
      }
      out.erase(begin, end - begin);
    }
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return {std::move(out), NegationRule::kRemoveNegation, {}};
  }

  if (!parse.auxiliaries.empty()) {
    const auto& aux = parse.auxiliaries.front();
    for (const auto& v : parse.verbs) {
      if (v.position > aux.position && (v.tag == "VBG" || v.tag == "VBN" || v.tag == "VB")) {
        return {insert_before(text, tokens[v.position].offset, "not"), NegationRule::kAuxiliary, {}};
      }
    }
    const auto& t = tokens[aux.position];
    return {insert_after(text, t.offset + t.length, "not"), NegationRule::kAuxiliary, {}};
  }

  if (!parse.verbs.empty()) {
    const auto& v = parse.verbs.front();
    const auto& t = tokens[v.position];
    std::string support = v.tag == "VBD" ? "did" : v.tag == "VBZ" ? "does" : "do";
    if (t.position == 0) support[0] = static_cast<char>(std::toupper(support[0]));
    const Token slot{t.text, t.offset, t.length};
    return {splice(text, slot, support + " not " + v.lemma), NegationRule::kDoSupport, {}};
  }

  return {std::nullopt, std::nullopt, "no negation rule applies"};
}

}  // namespace abstain::text
