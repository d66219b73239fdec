// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <set>

#include "abstain/core/csv.hpp"
#include "abstain/core/dataset.hpp"
#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/random.hpp"
#include "abstain/core/tokenize.hpp"
#include "abstain/core/types.hpp"
#include "temp_dir.hpp"

using namespace abstain;
using abstain::testing::read_file;
using abstain::testing::TempDir;
using abstain::testing::write_file;

namespace {

VqaInstance make(std::string id, std::string answer, std::string image = "img.png") {
  VqaInstance i;
  i.id = std::move(id);
  i.image_ref = std::move(image);
  i.question = "What is on the table?";
  i.answers = {std::move(answer)};
  i.question_type = "what is";
  return i;
}

std::vector<VqaInstance> synthetic(std::size_t n) {
  std::vector<VqaInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make("q" + std::to_string(i), "cup", "img" + std::to_string(i % 37) + ".png"));
  }
  return out;
}

}  // namespace

TEST_CASE("load_dataset on an empty file gives no instances") {
  TempDir dir;
  write_file(dir / "empty.jsonl", "");
  CHECK(load_dataset(dir / "empty.jsonl").empty());
}

TEST_CASE("dataset round trip is byte identical") {
  TempDir dir;
  const std::string line =
      R"({"answer_type":"other","answers":["red"],"id":"s1","image":"a.png",)"
      R"("question":"What color is the bridge?","question_type":"what color","split":"train"})";
  write_file(dir / "in.jsonl", line + "\n");
  auto loaded = load_dataset(dir / "in.jsonl");
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].split == Split::kTrain);
  save_dataset(loaded, dir / "out.jsonl");
  CHECK(read_file(dir / "out.jsonl") == line + "\n");
}

TEST_CASE("duplicate ids are reported with both line numbers") {
  TempDir dir;
  const auto a = to_json(make("dup", "red")).dump();
  write_file(dir / "d.jsonl", a + "\n" + a + "\n");
  try {
    load_dataset(dir / "d.jsonl");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.diagnostics().size() == 1);
    const auto& msg = e.diagnostics()[0];
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }
}

TEST_CASE("schema violations carry the line number") {
  TempDir dir;
  write_file(dir / "bad.jsonl", to_json(make("a", "x")).dump() + "\n{\"id\":\"b\"}\nnot json\n");
  try {
    load_dataset(dir / "bad.jsonl");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.diagnostics().size() == 2);
    CHECK(e.diagnostics()[0].rfind("line 2", 0) == 0);
    CHECK(e.diagnostics()[1].rfind("line 3", 0) == 0);
  }
  CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl"), Error);
}

TEST_CASE("save_dataset writes one line per instance and keeps unicode") {
  TempDir dir;
  std::vector<VqaInstance> none;
  save_dataset(none, dir / "none.jsonl");
  CHECK(read_file(dir / "none.jsonl").empty());

  auto items = synthetic(3);
  items[1].question = "Qu'y a-t-il sous le pont \xC3\xA0 Z\xC3\xBCrich?";
  save_dataset(items, dir / "three.jsonl");
  const auto text = read_file(dir / "three.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(load_dataset(dir / "three.jsonl") == items);
}

TEST_CASE("filter_binary_answers") {
  std::vector<VqaInstance> in = {make("a", "yes"), make("b", "2"), make("c", " No. "),
                                 make("d", "yesterday")};
  const auto out = filter_binary_answers(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == "b");
  CHECK(out[1].id == "d");
  CHECK(filter_binary_answers(std::vector<VqaInstance>{}).empty());
}

TEST_CASE("split sizes follow integer arithmetic") {
  const SplitRatios ratios{0.7, 0.1, 0.2};
  auto small = synthetic(100);
  auto s = split_dataset(small, ratios, 3);
  CHECK(s.train_ids.size() == 70);
  CHECK(s.valid_ids.size() == 10);
  CHECK(s.test_ids.size() == 20);

  auto odd = synthetic(7);
  s = split_dataset(odd, ratios, 3);
  CHECK(s.valid_ids.size() == 0);
  CHECK(s.test_ids.size() == 1);
  CHECK(s.train_ids.size() == 6);

  CHECK_THROWS_AS(split_dataset(small, SplitRatios{0.5, 0.1, 0.1}, 1), Error);
  CHECK_THROWS_AS(split_dataset(small, SplitRatios{1.0, 0.0, 0.0}, 1), Error);
}

TEST_CASE("split is a deterministic partition") {
  auto items = synthetic(500);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const auto a = split_dataset(items, {0.7, 0.1, 0.2}, seed);
    const auto b = split_dataset(items, {0.7, 0.1, 0.2}, seed);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.valid_ids == b.valid_ids);
    CHECK(a.test_ids == b.test_ids);
    std::multiset<std::string> all;
    for (const auto* ids : {&a.train_ids, &a.valid_ids, &a.test_ids}) all.insert(ids->begin(), ids->end());
    CHECK(all.size() == items.size());
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == items.size());
  }
  const auto c = split_dataset(items, {0.7, 0.1, 0.2}, 1);
  const auto d = split_dataset(items, {0.7, 0.1, 0.2}, 2);
  CHECK(c.train_ids != d.train_ids);
}

TEST_CASE("stratified split applies the ratios within each stratum") {
  auto items = synthetic(300);
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].answer_type = i < 100 ? AnswerType::kNumber : AnswerType::kOther;
  }
  const auto s = split_dataset(items, {0.7, 0.1, 0.2}, 5, [](const VqaInstance& i) {
    return std::string(to_string(i.answer_type));
  });
  std::map<std::pair<AnswerType, Split>, int> counts;
  for (const auto& i : apply_split(items, s)) {
    CHECK(i.split != Split::kUnassigned);
    ++counts[{i.answer_type, i.split}];
  }
  CHECK(counts[{AnswerType::kNumber, Split::kTrain}] == 70);
  CHECK(counts[{AnswerType::kNumber, Split::kValid}] == 10);
  CHECK(counts[{AnswerType::kNumber, Split::kTest}] == 20);
  CHECK(counts[{AnswerType::kOther, Split::kTrain}] == 140);
  CHECK(counts[{AnswerType::kOther, Split::kValid}] == 20);
  CHECK(counts[{AnswerType::kOther, Split::kTest}] == 40);
}

TEST_CASE("perturbation record validation") {
  PerturbationRecord r;
  r.source_id = "s1";
  r.kind = PerturbationKind::kWordReplace;
  CHECK_THROWS_AS(validate(r), Error);
  r.perturbed_question = "What is under the tunnel?";
  CHECK_NOTHROW(validate(r));
  r.perturbed_image_ref = "x.png";
  CHECK_THROWS_AS(validate(r), Error);
  r.kind = PerturbationKind::kObjectMask;
  r.perturbed_question.reset();
  CHECK_NOTHROW(validate(r));
  CHECK(record_from_json(to_json(r)) == r);
}

TEST_CASE("kind and type names round trip") {
  for (auto k : {PerturbationKind::kWordReplace, PerturbationKind::kNegation,
                 PerturbationKind::kImageReplace, PerturbationKind::kObjectMask,
                 PerturbationKind::kCopyMove}) {
    CHECK(parse_perturbation_kind(to_string(k)) == k);
  }
  CHECK(parse_answer_type("yes/no") == AnswerType::kYesNo);
  CHECK(parse_answer_type(to_string(AnswerType::kNumber)) == AnswerType::kNumber);
  CHECK_THROWS_AS(parse_answer_type("colour"), Error);
}

TEST_CASE("lexical helpers") {
  CHECK(normalize_answer("  Yes! ") == "yes");
  CHECK(normalize_open_answer("The  Red Bridge.") == "red bridge");
  CHECK(singularize("dogs") == "dog");
  CHECK(singularize("mice") == "mouse");
  CHECK(verb_lemma("threw") == "throw");
  CHECK(verb_lemma("holding") == "hold");
  CHECK(lexical_key("dogs") == lexical_key("dog"));
  CHECK(lexical_key("cat") != lexical_key("dog"));
  CHECK(is_question_word("What"));
  CHECK_FALSE(is_question_word("bridge"));
}

TEST_CASE("tokenize keeps offsets and splice replaces one token") {
  const std::string q = "What is under the bridge?";
  const auto toks = tokenize(q);
  REQUIRE(toks.size() == 6);
  CHECK(toks[4].text == "bridge");
  CHECK(q.substr(toks[4].offset, toks[4].length) == "bridge");
  CHECK(splice(q, toks[4], "tunnel") == "What is under the tunnel?");
  CHECK(expand_contractions("Isn't it red?") == "Is not it red?");
}

TEST_CASE("csv quoting round trips") {
  const std::vector<std::string> row = {"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  const auto text = csv::format_row(row);
  const auto parsed = csv::parse(text + "\n");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0] == row);
  CHECK_THROWS_AS(csv::parse("\"open"), Error);
}

TEST_CASE("rng helpers are deterministic and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = uniform_index(a, 7);
    CHECK(x == uniform_index(b, 7));
    CHECK(x < 7);
    const double u = uniform_real(a);
    CHECK(u == uniform_real(b));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[i] = i;
  auto w = v;
  Rng r(9);
  seeded_shuffle(std::span<int>(w), r);
  std::vector<int> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
}

TEST_CASE("write_lines_locked replaces file contents") {
  TempDir dir;
  const std::vector<std::string> first = {"a", "b", "c"};
  const std::vector<std::string> second = {"z"};
  write_lines_locked(dir / "f.txt", first);
  write_lines_locked(dir / "f.txt", second);
  CHECK(read_file(dir / "f.txt") == "z\n");
}
