// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/core/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace abstain {
namespace {

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }
bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_plurals() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"men", "man"},       {"women", "woman"},     {"children", "child"},
      {"people", "person"}, {"mice", "mouse"},      {"geese", "goose"},
      {"feet", "foot"},     {"teeth", "tooth"},     {"knives", "knife"},
      {"leaves", "leaf"},   {"wolves", "wolf"},     {"shelves", "shelf"},
      {"loaves", "loaf"},   {"halves", "half"},     {"calves", "calf"},
      {"wives", "wife"},    {"lives", "life"},      {"scarves", "scarf"},
      {"sheep", "sheep"},   {"fish", "fish"},       {"deer", "deer"},
      {"tomatoes", "tomato"}, {"potatoes", "potato"}, {"heroes", "hero"},
      {"oxen", "ox"},       {"skis", "ski"},        {"cacti", "cactus"},
  };
  return table;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_verbs() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"threw", "throw"},   {"thrown", "throw"},  {"held", "hold"},     {"ate", "eat"},
      {"eaten", "eat"},     {"sat", "sit"},       {"ran", "run"},       {"wore", "wear"},
      {"worn", "wear"},     {"took", "take"},     {"taken", "take"},    {"made", "make"},
      {"went", "go"},       {"gone", "go"},       {"saw", "see"},       {"seen", "see"},
      {"gave", "give"},     {"given", "give"},    {"flew", "fly"},      {"flown", "fly"},
      {"drove", "drive"},   {"driven", "drive"},  {"rode", "ride"},     {"ridden", "ride"},
      {"stood", "stand"},   {"wrote", "write"},   {"written", "write"}, {"caught", "catch"},
      {"brought", "bring"}, {"bought", "buy"},    {"broke", "break"},   {"broken", "break"},
      {"got", "get"},       {"said", "say"},      {"did", "do"},        {"done", "do"},
      {"does", "do"},       {"was", "be"},        {"were", "be"},       {"is", "be"},
      {"are", "be"},        {"am", "be"},         {"been", "be"},       {"had", "have"},
      {"has", "have"},      {"came", "come"},     {"drank", "drink"},   {"drunk", "drink"},
      {"fell", "fall"},     {"fallen", "fall"},   {"found", "find"},    {"hit", "hit"},
      {"kept", "keep"},     {"left", "leave"},    {"lay", "lie"},       {"lain", "lie"},
      {"led", "lead"},      {"put", "put"},       {"swam", "swim"},     {"swum", "swim"},
      {"sang", "sing"},     {"sung", "sing"},     {"slept", "sleep"},   {"spent", "spend"},
      {"told", "tell"},     {"thought", "think"}, {"won", "win"},       {"used", "use"},
      {"hung", "hang"},     {"built", "build"},   {"cut", "cut"},       {"fed", "feed"},
      {"grew", "grow"},     {"grown", "grow"},    {"knew", "know"},     {"known", "know"},
      {"sold", "sell"},     {"sent", "send"},     {"shot", "shoot"},    {"set", "set"},
  };
  return table;
}

std::string undouble(std::string stem) {
  const auto n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z' && c != 'f') stem.pop_back();
  }
  return stem;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize_answer(std::string_view text) {
  std::size_t b = 0, e = text.size();
  auto strip = [](unsigned char c) { return is_space(c) || is_punct(c); };
  while (b < e && strip(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && strip(static_cast<unsigned char>(text[e - 1]))) --e;
  return to_lower(text.substr(b, e - b));
}

std::string normalize_open_answer(std::string_view text) {
  std::string lowered = to_lower(text);
  while (!lowered.empty() &&
         (is_space(static_cast<unsigned char>(lowered.back())) ||
          lowered.back() == '.' || lowered.back() == '!' || lowered.back() == '?' ||
          lowered.back() == ',' || lowered.back() == ';' || lowered.back() == ':')) {
    lowered.pop_back();
  }
  std::istringstream words(lowered);
  std::string word, out;
  while (words >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

std::string singularize(std::string_view word) {
  std::string w = to_lower(word);
  if (auto it = irregular_plurals().find(w); it != irregular_plurals().end()) {
    return std::string(it->second);
  }
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "zes") ||
                       ends_with(w, "ches") || ends_with(w, "shes"))) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

std::string verb_lemma(std::string_view word) {
  std::string w = to_lower(word);
  if (auto it = irregular_verbs().find(w); it != irregular_verbs().end()) {
    return std::string(it->second);
  }
  auto restore_e = [](std::string stem) {
    // bak -> bake, lik -> like: short consonant-vowel-consonant stems.
    const auto n = stem.size();
    if (n == 3 && !is_vowel(stem[0]) && is_vowel(stem[1]) && !is_vowel(stem[2]) &&
        stem[2] != 'w' && stem[2] != 'x' && stem[2] != 'y') {
      stem += 'e';
    }
    return stem;
  };
  if (w.size() > 4 && ends_with(w, "ied")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() >= 5 && ends_with(w, "ing")) {
    auto stem = w.substr(0, w.size() - 3);
    const auto undoubled = undouble(stem);
    return undoubled != stem ? undoubled : restore_e(stem);
  }
  if (w.size() >= 5 && ends_with(w, "ed")) {
    auto stem = w.substr(0, w.size() - 2);
    const auto undoubled = undouble(stem);
    return undoubled != stem ? undoubled : restore_e(stem);
  }
  if (w.size() > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "sses") ||
                       ends_with(w, "xes"))) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss")) return w.substr(0, w.size() - 1);
  return w;
}

std::string lexical_key(std::string_view word) {
  const std::string w = to_lower(word);
  std::string base;
  if (auto it = irregular_plurals().find(w); it != irregular_plurals().end()) {
    base = it->second;
  } else if (auto v = irregular_verbs().find(w); v != irregular_verbs().end()) {
    base = v->second;
  } else if (w.size() >= 6 && ends_with(w, "ing")) {
    base = undouble(w.substr(0, w.size() - 3));
  } else if (w.size() >= 5 && ends_with(w, "ed")) {
    base = undouble(w.substr(0, w.size() - 2));
  } else {
    base = singularize(w);
  }
  // make / making / made all reduce to "mak".
  if (base.size() > 2 && base.back() == 'e') base.pop_back();
  return base;
}

bool is_question_word(std::string_view word) {
  static const std::vector<std::string_view> words = {"what",  "which", "who", "whom", "whose",
                                                      "where", "when",  "why", "how"};
  const auto w = to_lower(word);
  return std::find(words.begin(), words.end(), w) != words.end();
}

}  // namespace abstain
