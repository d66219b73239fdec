// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/text/backends.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/tokenize.hpp"

namespace abstain::text {
namespace {

using Lexicon = std::unordered_map<std::string, std::string>;

const Lexicon& builtin_lexicon() {
  static const Lexicon lexicon = [] {
    Lexicon l;
    auto add = [&l](std::initializer_list<const char*> words, const char* tag) {
      for (const char* w : words) l.emplace(w, tag);
    };
    add({"what", "who", "whom"}, "WP");
    add({"whose"}, "WP$");
    add({"which"}, "WDT");
    add({"where", "when", "why", "how"}, "WRB");
    add({"the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every",
         "another", "all", "both", "no"},
        "DT");
    add({"he", "she", "it", "they", "we", "you", "i", "me", "him", "them", "us", "someone",
         "something", "anyone", "anything", "everyone", "everything", "nobody", "nothing"},
        "PRP");
    add({"his", "her", "its", "their", "our", "my", "your"}, "PRP$");
    add({"is", "does", "has"}, "VBZ");
    add({"are", "am", "do", "have"}, "VBP");
    add({"was", "were", "did", "had"}, "VBD");
    add({"be"}, "VB");
    add({"been"}, "VBN");
    add({"being"}, "VBG");
    add({"can", "could", "will", "would", "should", "may", "might", "must", "shall"}, "MD");
    add({"in", "on", "at", "under", "over", "of", "for", "with", "by", "from", "into", "near",
         "behind", "above", "below", "beside", "between", "inside", "outside", "through",
         "across", "around", "onto", "toward", "towards", "against", "along", "about", "like",
         "next", "underneath", "beneath", "during", "without", "upon", "off", "out", "up",
         "down", "than"},
        "IN");
    add({"to"}, "TO");
    add({"and", "or", "but", "nor"}, "CC");
    add({"not", "never", "hardly", "very", "too", "also", "there", "here", "now", "just",
         "still", "currently", "probably", "most", "more", "so"},
        "RB");
    add({"red", "blue", "green", "yellow", "white", "black", "brown", "orange", "pink", "purple",
         "gray", "grey", "silver", "gold", "many", "much", "big", "small", "large", "little",
         "tall", "short", "old", "young", "new", "other", "same", "different", "main", "wooden",
         "dark", "light", "full", "empty", "open", "closed", "happy", "sad", "hot", "cold",
         "long", "high", "low", "favorite", "few", "first", "last", "top", "bottom"},
        "JJ");
    add({"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
         "eleven", "twelve", "zero", "hundred"},
        "CD");
    // Base-form verbs; a determiner/adjective before them flips to a noun.
    add({"hold", "eat", "wear", "play", "ride", "sit", "stand", "throw", "take", "make", "go",
         "see", "give", "fly", "drive", "write", "catch", "bring", "buy", "break", "get", "say",
         "use", "look", "want", "need", "read", "carry", "walk", "run", "jump", "swim", "sleep",
         "drink", "cook", "watch", "hit", "lie", "lay", "hang", "cross", "show", "mean", "say",
         "keep", "grow", "sell", "cover", "face", "feed", "pull", "push", "serve", "stop"},
        "VB");
    add({"threw", "held", "ate", "sat", "ran", "wore", "took", "made", "went", "saw", "gave",
         "flew", "drove", "rode", "stood", "wrote", "caught", "brought", "bought", "broke",
         "got", "said", "came", "drank", "fell", "found", "kept", "led", "swam", "sang",
         "slept", "spent", "told", "thought", "won", "hung", "built", "fed", "grew", "knew",
         "sold", "sent", "shot"},
        "VBD");
    add({"thrown", "eaten", "worn", "taken", "gone", "seen", "given", "flown", "driven",
         "ridden", "written", "broken", "fallen", "drunk", "swum", "sung", "grown", "known"},
        "VBN");
    // -ing / -ed nouns that the suffix rules would mistag.
    add({"building", "ceiling", "clothing", "painting", "wedding", "thing", "ring", "king",
         "string", "wing", "swing", "sling", "evening", "morning", "railing", "sibling",
         "pudding", "stuffing", "frosting", "icing", "topping", "awning", "bedding", "sign",
         "bed", "shed", "sled", "sink", "cake"},
        "NN");
    return l;
  }();
  return lexicon;
}

bool is_punctuation(std::string_view token) {
  return token.size() == 1 && std::ispunct(static_cast<unsigned char>(token[0]));
}

bool is_number(std::string_view token) {
  bool digit = false;
  for (char c : token) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',') {
      return false;
    }
  }
  return digit;
}

bool nominal_context(std::string_view previous_tag) {
  return previous_tag == "DT" || previous_tag == "PRP$" || previous_tag == "JJ" ||
         previous_tag == "CD" || previous_tag == "WP$";
}

}  // namespace

bool is_noun_tag(std::string_view tag) { return tag.starts_with("NN"); }

bool is_verb_tag(std::string_view tag) { return tag.starts_with("VB"); }

RuleTagger::RuleTagger() = default;

RuleTagger RuleTagger::from_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tagger table " + path.string());
  RuleTagger tagger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("tagger table row without tab: " + line);
    tagger.set(line.substr(0, tab), line.substr(tab + 1));
  }
  return tagger;
}

void RuleTagger::set(std::string word, std::string tag) {
  overrides_[to_lower(word)] = std::move(tag);
}

std::vector<TaggedToken> RuleTagger::tag(std::string_view text) const {
  const auto tokens = tokenize(text);
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  std::string previous = ".";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const auto lower = to_lower(tok.text);
    std::string tag;
    if (auto it = overrides_.find(lower); it != overrides_.end()) {
      tag = it->second;
    } else if (is_punctuation(tok.text)) {
      tag = ".";
    } else if (is_number(tok.text)) {
      tag = "CD";
    } else if (auto lex = builtin_lexicon().find(lower); lex != builtin_lexicon().end()) {
      tag = lex->second;
      if (tag == "VB" && nominal_context(previous)) tag = "NN";
    } else if (lower.size() >= 5 && lower.ends_with("ing")) {
      tag = nominal_context(previous) ? "NN" : "VBG";
    } else if (lower.size() >= 5 && lower.ends_with("ed")) {
      tag = (previous.starts_with("VB")) ? "VBN" : "VBD";
    } else if (lower.size() > 4 && lower.ends_with("ly")) {
      tag = "RB";
    } else if (lower.ends_with("ous") || lower.ends_with("ful") || lower.ends_with("ive") ||
               lower.ends_with("able")) {
      tag = "JJ";
    } else if (i > 0 && std::isupper(static_cast<unsigned char>(tok.text[0]))) {
      tag = "NNP";
    } else if (lower.size() > 3 && lower.ends_with("s") && !lower.ends_with("ss") &&
               !lower.ends_with("us") && !lower.ends_with("is")) {
      tag = "NNS";
    } else {
      tag = "NN";
    }
    out.push_back({tok.text, tag, i, tok.offset, tok.length});
    previous = tag;
  }
  return out;
}

bool is_negation_keyword(std::string_view word) {
  const auto w = to_lower(word);
  return w == "not" || w == "never" || w == "hardly";
}

ClauseParse RuleDependencyParser::parse(std::string_view text) const {
  ClauseParse out;
  out.text = expand_contractions(text);
  out.tokens = tagger_.tag(out.text);

  auto is_aux_lexeme = [](const TaggedToken& t) {
    const auto lemma = verb_lemma(t.text);
    return t.tag == "MD" ||
           (is_verb_tag(t.tag) && (lemma == "be" || lemma == "do" || lemma == "have"));
  };

  bool seen_aux = false;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    const auto& t = out.tokens[i];
    if (is_negation_keyword(t.text)) {
      out.negations.push_back(i);
      continue;
    }
    if (is_aux_lexeme(t)) {
      bool governs_verb = false;
      for (std::size_t j = i + 1; j < out.tokens.size(); ++j) {
        if (is_verb_tag(out.tokens[j].tag) && !is_aux_lexeme(out.tokens[j])) governs_verb = true;
      }
      if (!seen_aux || governs_verb) {
        out.auxiliaries.push_back({i, t.tag == "MD" ? to_lower(t.text) : verb_lemma(t.text), t.tag});
        seen_aux = true;
        continue;
      }
    }
    if (is_verb_tag(t.tag)) out.verbs.push_back({i, verb_lemma(t.text), t.tag});
  }

  // do-support without a recognised verb: the last word is the bare verb
  // ("What does the man wear?").
  const bool do_aux = !out.auxiliaries.empty() && out.auxiliaries.front().lemma == "do";
  if (do_aux && out.verbs.empty()) {
    for (std::size_t i = out.tokens.size(); i-- > out.auxiliaries.front().position + 1;) {
      const auto& t = out.tokens[i];
      if (t.tag == ".") continue;
      if (t.tag.starts_with("NN") || t.tag.starts_with("VB")) {
        out.verbs.push_back({i, verb_lemma(t.text), "VB"});
      }
      break;
    }
  }
  return out;
}

LookupLmScorer LookupLmScorer::from_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open LM table " + path.string());
  LookupLmScorer scorer;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error("LM table row without tab: " + line);
    scorer.set(line.substr(0, tab), std::stod(line.substr(tab + 1)));
  }
  return scorer;
}

void LookupLmScorer::set(std::string sentence, double nll) { table_[std::move(sentence)] = nll; }

double LookupLmScorer::score(std::string_view text) const {
  auto it = table_.find(std::string(text));
  if (it == table_.end()) throw Error("no LM score for '" + std::string(text) + "'");
  return it->second;
}

UnigramLmScorer::UnigramLmScorer(double floor_probability) : floor_(floor_probability) {
  if (!(floor_ > 0.0 && floor_ <= 1.0)) throw Error("unigram floor probability must be in (0, 1]");
}

UnigramLmScorer UnigramLmScorer::from_table(const std::filesystem::path& path,
                                            double floor_probability) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open unigram table " + path.string());
  UnigramLmScorer scorer(floor_probability);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string token;
    double p = 0;
    if (!(row >> token >> p)) throw Error("bad unigram row: " + line);
    scorer.set(token, p);
  }
  return scorer;
}

void UnigramLmScorer::set(std::string token, double probability) {
  if (!(probability > 0.0 && probability <= 1.0)) {
    throw Error("unigram probability for '" + token + "' must be in (0, 1]");
  }
  probs_[to_lower(token)] = probability;
}

double UnigramLmScorer::score(std::string_view text) const {
  double nll = 0.0;
  for (const auto& tok : tokenize(text)) {
    auto it = probs_.find(to_lower(tok.text));
    nll -= std::log(it == probs_.end() ? floor_ : it->second);
  }
  return nll;
}

}  // namespace abstain::text
