// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <set>

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"
#include "abstain/eval/harness.hpp"
#include "abstain/eval/metrics.hpp"
#include "abstain/eval/parse.hpp"
#include "abstain/eval/prompt.hpp"
#include "abstain/eval/report.hpp"
#include "temp_dir.hpp"

using namespace abstain;
using namespace abstain::eval;
using abstain::annotation::Reason;
using abstain::testing::data_dir;
using abstain::testing::read_file;

namespace {

const McOptions kOpts = {"water", "boat", "road", "unanswerable"};

std::vector<ShotExemplar> pool(int answerable, int unanswerable) {
  std::vector<ShotExemplar> out;
  for (int i = 0; i < answerable; ++i) {
    out.push_back({"a" + std::to_string(i), "Qa" + std::to_string(i), "red", true});
  }
  for (int i = 0; i < unanswerable; ++i) {
    out.push_back({"u" + std::to_string(i), "Qu" + std::to_string(i), "unanswerable", false});
  }
  return out;
}

// Per-class precision/recall/F1 straight from the definitions.
double f1_oracle(const std::vector<int>& pred, const std::vector<int>& gold) {
  std::set<int> classes(gold.begin(), gold.end());
  double total = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == c) ++support;
      if (pred[i] == c && gold[i] == c) ++tp;
      if (pred[i] == c && gold[i] != c) ++fp;
      if (pred[i] != c && gold[i] == c) ++fn;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    total += f * support / static_cast<double>(gold.size());
  }
  return total;
}

EvalItem item(std::string id, bool answerable, AnswerType type = AnswerType::kOther) {
  EvalItem it;
  it.id = std::move(id);
  it.image_ref = it.id + ".png";
  it.question = "What is under the bridge?";
  it.answer_type = type;
  it.answerable = answerable;
  it.options = {"water", "boat", "road"};
  if (!answerable) it.reason = Reason::kMissingConcept;
  return it;
}

class FlakyClient final : public ModelClient {
 public:
  explicit FlakyClient(int failures) : failures_(failures) {}
  std::string name() const override { return "flaky"; }
  std::string complete(const ModelRequest&) override {
    if (calls_++ < failures_) throw Error("timeout");
    return "answerable";
  }

 private:
  int failures_;
  std::atomic<int> calls_{0};
};

}  // namespace

TEST_CASE("templates match the golden files byte for byte") {
  const auto golden = data_dir() / "golden";
  const std::string q = "What is under the bridge?";
  CHECK(build_prompt(q, Protocol::kBY) == read_file(golden / "by.txt"));
  CHECK(build_prompt(q, Protocol::kMC, kOpts) == read_file(golden / "mc.txt"));
  CHECK(build_prompt(q, Protocol::kOE) == read_file(golden / "oe.txt"));
  CHECK(build_prompt(q, Protocol::kOEH, std::nullopt, Reason::kMissingConcept) ==
        read_file(golden / "oeh.txt"));
}

TEST_CASE("OEH differs from OE only by the hint sentence") {
  const std::string q = "How many dogs are on the grass?";
  for (auto r : {Reason::kUnclear, Reason::kNeedsKnowledge, Reason::kMissingConcept,
                 Reason::kMultipleAnswers}) {
    const auto oe = build_prompt(q, Protocol::kOE);
    const auto oeh = build_prompt(q, Protocol::kOEH, std::nullopt, r);
    REQUIRE(oeh.rfind(oe, 0) == 0);
    CHECK(oeh.substr(oe.size()) == " If you feel it " + std::string(annotation::description(r)) +
                                       ", you can simply reply ``unanswerable''.");
  }
}

TEST_CASE("template slot errors") {
  CHECK_THROWS_AS(build_prompt("", Protocol::kOE), Error);
  CHECK_THROWS_AS(build_prompt("q", Protocol::kMC), Error);
  CHECK_THROWS_AS(build_prompt("q", Protocol::kBY, kOpts), Error);
  CHECK_THROWS_AS(build_prompt("q", Protocol::kOEH), Error);
  CHECK_THROWS_AS(build_prompt("q", Protocol::kOE, std::nullopt, Reason::kUnclear), Error);
}

TEST_CASE("few-shot composition") {
  const auto p = pool(6, 6);
  CHECK(assemble_few_shot("Q", {0, 0, 1}, p).text == "Q");
  for (auto [na, nu] : {std::pair{0, 1}, {1, 2}, {0, 3}, {3, 0}, {1, 4}, {0, 5}, {5, 0}}) {
    const ShotConfig shots{na, nu, 9};
    const auto out = assemble_few_shot("QUERY", shots, p, "q1");
    REQUIRE(static_cast<int>(out.exemplar_ids.size()) == na + nu);
    int a = 0, u = 0;
    for (const auto& id : out.exemplar_ids) (id[0] == 'a' ? a : u)++;
    CHECK(a == na);
    CHECK(u == nu);
    CHECK(out.n_answerable == na);
    CHECK(out.n_unanswerable == nu);
    CHECK(out.text.size() > 5);
    CHECK(out.text.substr(out.text.size() - 5) == "QUERY");
    CHECK(assemble_few_shot("QUERY", shots, p, "q1").text == out.text);
  }
  const auto one = assemble_few_shot("Q", {1, 0, 0}, pool(1, 0));
  CHECK(one.text == "Qa0\nAnswer: red\n\nQ");
  CHECK_THROWS_AS(assemble_few_shot("Q", {0, 3, 0}, pool(5, 2)), Error);
  const auto self = pool(1, 0);
  CHECK_THROWS_AS(assemble_few_shot("Q", {1, 0, 0}, self, "a0"), Error);
}

TEST_CASE("parse BY") {
  CHECK(parse_response("Unanswerable.", Protocol::kBY).verdict == VerdictKind::kUnanswerable);
  CHECK(parse_response("It is answerable", Protocol::kBY).verdict == VerdictKind::kAnswerable);
  CHECK(parse_response("I do not know what is happening here", Protocol::kBY).verdict ==
        VerdictKind::kOutOfScope);
  CHECK(parse_response("", Protocol::kBY).verdict == VerdictKind::kOutOfScope);
}

TEST_CASE("parse MC") {
  auto b = parse_response("B", Protocol::kMC, kOpts);
  CHECK(b.verdict == VerdictKind::kChoice);
  CHECK(b.choice == 1);
  CHECK(parse_response("D. unanswerable", Protocol::kMC, kOpts).choice == 3);
  CHECK(parse_response("(C)", Protocol::kMC, kOpts).choice == 2);
  CHECK(parse_response("The answer is road.", Protocol::kMC, kOpts).choice == 2);
  CHECK(parse_response("A boat", Protocol::kMC, kOpts).choice == 1);
  CHECK(parse_response("Both water and boat", Protocol::kMC, kOpts).verdict ==
        VerdictKind::kOutOfScope);
  CHECK(parse_response("Elephant", Protocol::kMC, kOpts).verdict == VerdictKind::kOutOfScope);
}

TEST_CASE("parse OE") {
  auto r = parse_response("The Water.", Protocol::kOE);
  CHECK(r.verdict == VerdictKind::kFreeText);
  CHECK(r.text == "water");
  CHECK(parse_response("I don\xE2\x80\x99t know.", Protocol::kOE).verdict ==
        VerdictKind::kUnanswerable);
  CHECK(parse_response("Unanswerable", Protocol::kOEH).verdict == VerdictKind::kUnanswerable);
  CHECK(parse_response("knottier", Protocol::kOE).verdict == VerdictKind::kFreeText);
  CHECK(parse_response("  ", Protocol::kOE).verdict == VerdictKind::kOutOfScope);
  CHECK(refusal_lexicon().size() == 5);
}

TEST_CASE("acc_binary and acc_open") {
  std::vector<ParsedResponse> parsed(100);
  bool gold[100];
  for (int i = 0; i < 100; ++i) {
    gold[i] = i % 2;
    const bool says_answerable = i < 58 ? gold[i] : !gold[i];
    parsed[i].verdict = says_answerable ? VerdictKind::kAnswerable : VerdictKind::kUnanswerable;
  }
  const std::span<const bool> buf(gold, 100);
  CHECK(percent(acc_binary(parsed, buf)) == "58.0");
  parsed[0].verdict = VerdictKind::kOutOfScope;
  CHECK(acc_binary(parsed, buf) == doctest::Approx(0.57));

  CHECK(open_correct("unanswerable", {{}, true}));
  CHECK(open_correct("The bridge", {{"bridge"}, false}));
  CHECK_FALSE(open_correct("tunnel", {{"bridge"}, false}));
  CHECK_FALSE(open_correct("unanswerable", {{"bridge"}, false}));
  const std::vector<std::string> preds = {"bridge", "x"};
  const std::vector<OpenGold> golds = {{{"bridge"}, false}, {{"y"}, false}};
  CHECK(acc_open(preds, golds) == 0.5);
  CHECK_THROWS_AS(acc_open(preds, std::span(golds.data(), 1)), Error);
}

TEST_CASE("weighted_f1") {
  const std::vector<int> g = {0, 0, 0, 1};
  CHECK(weighted_f1(g, g) == 1.0);
  const std::vector<int> p = {0, 0, 0, 0};
  const double f0 = 2 * 0.75 * 1.0 / 1.75;
  CHECK(weighted_f1(p, g) == doctest::Approx(0.75 * f0));
  const std::vector<int> all_right = {0, 0, 0, 1}, hand = {0, 0, 0, 2};
  CHECK(weighted_f1(hand, all_right) == doctest::Approx(0.75));

  Rng rng(31);
  for (int round = 0; round < 100; ++round) {
    const auto n = 1 + uniform_index(rng, 60);
    std::vector<int> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(uniform_index(rng, 5));
      pred[i] = uniform_index(rng, 3) == 0 ? gold[i] : static_cast<int>(uniform_index(rng, 5));
    }
    CHECK(std::abs(weighted_f1(pred, gold) - f1_oracle(pred, gold)) < 1e-9);
  }
}

TEST_CASE("weighted_f1 equals the macro mean under equal supports") {
  Rng rng(32);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> gold, pred;
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < 5; ++k) gold.push_back(c);
    }
    for (std::size_t i = 0; i < gold.size(); ++i) pred.push_back(static_cast<int>(uniform_index(rng, 4)));
    double macro = 0;
    for (int c = 0; c < 4; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        tp += pred[i] == c && gold[i] == c;
        fp += pred[i] == c && gold[i] != c;
        fn += pred[i] != c && gold[i] == c;
      }
      macro += tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    }
    CHECK(weighted_f1(pred, gold) == doctest::Approx(macro / 4));
  }
}

TEST_CASE("mc permutation and expected responses") {
  const auto it = item("e1", true);
  const auto perm = mc_permutation(5, "e1");
  CHECK(perm == mc_permutation(5, "e1"));
  std::set<int> seen(perm.begin(), perm.end());
  CHECK(seen == std::set<int>{0, 1, 2, 3});
  const auto opts = mc_options(it, perm);
  for (int i = 0; i < 4; ++i) {
    CHECK(opts[i] == (perm[i] == 3 ? std::string(kUnanswerableOption) : it.options[perm[i]]));
  }
  const auto letter = expected_response(it, Protocol::kMC, 5);
  REQUIRE(letter.size() == 1);
  CHECK(perm[letter[0] - 'A'] == 0);
  CHECK(expected_response(it, Protocol::kBY, 5) == "answerable");
  CHECK(expected_response(item("e2", false), Protocol::kOE, 5) == "unanswerable");
  CHECK(expected_response(it, Protocol::kOEH, 5) == "water");
}

TEST_CASE("run_eval with stub clients") {
  std::vector<EvalItem> items = {item("a", true, AnswerType::kNumber), item("b", false),
                                 item("c", true, AnswerType::kYesNo), item("d", false)};
  for (auto protocol : {Protocol::kBY, Protocol::kMC, Protocol::kOE, Protocol::kOEH}) {
    EvalConfig config;
    config.protocol = protocol;
    config.seed = 3;
    OracleClient oracle(items, protocol, config.seed);
    const auto ok = run_eval(items, oracle, config);
    CHECK(ok.report.all().acc_b == 1.0);
    CHECK(ok.report.all().oos_ratio == 0.0);
    CHECK(ok.report.all().f1_weighted == doctest::Approx(1.0));
    if (protocol == Protocol::kBY) {
      CHECK_FALSE(ok.report.all().acc_o.has_value());
    } else {
      CHECK(*ok.report.all().acc_o == 1.0);
    }
    CHECK(ok.report.breakdown.at("number").n == 1);

    EmptyClient empty;
    const auto none = run_eval(items, empty, config);
    CHECK(none.report.all().oos_ratio == 1.0);
    CHECK(none.report.all().acc_b == 0.0);
  }
}

TEST_CASE("run_eval retries then records errors") {
  std::vector<EvalItem> items = {item("a", true)};
  EvalConfig config;
  config.concurrency = 1;
  FlakyClient twice(2);
  auto r = run_eval(items, twice, config);
  CHECK(r.records[0].attempts == 3);
  CHECK_FALSE(r.records[0].error);
  CHECK(r.report.all().correct == 1);

  FlakyClient always(100);
  r = run_eval(items, always, config);
  CHECK(r.records[0].error);
  CHECK(r.report.all().errors == 1);
  CHECK(r.report.all().oos_ratio == 1.0);
  const auto& b = r.report.all();
  CHECK(b.correct + b.incorrect + b.out_of_scope + b.errors == b.n);
}

TEST_CASE("metrics are invariant to record order") {
  std::vector<EvalItem> items;
  std::map<std::string, std::string> replies;
  Rng rng(8);
  const char* choices[] = {"answerable", "unanswerable", "maybe"};
  for (int i = 0; i < 40; ++i) {
    const auto id = "i" + std::to_string(i);
    items.push_back(item(id, i % 3 != 0, static_cast<AnswerType>(i % 3)));
    replies[id] = choices[uniform_index(rng, 3)];
  }
  ReplayClient client(replies);
  EvalConfig config;
  const auto r = run_eval(items, client, config);
  auto records = r.records;
  seeded_shuffle(std::span<EvalRecord>(records), rng);
  const auto again = aggregate(records, items, config, "replay");
  CHECK(to_json(again) == to_json(r.report));
  CHECK(to_json(metric_report_from_json(to_json(r.report))) == to_json(r.report));
}

TEST_CASE("report rendering") {
  std::vector<EvalItem> items;
  std::map<std::string, std::string> replies;
  for (int i = 0; i < 1000; ++i) {
    const auto id = "i" + std::to_string(i);
    items.push_back(item(id, i % 2 == 0));
    // 409 right, 104 out of scope, the rest wrong.
    if (i < 409) {
      replies[id] = i % 2 == 0 ? "answerable" : "unanswerable";
    } else if (i < 513) {
      replies[id] = "no idea";
    } else {
      replies[id] = i % 2 == 0 ? "unanswerable" : "answerable";
    }
  }
  ReplayClient client(replies);
  EvalConfig config;
  const auto r = run_eval(items, client, config);
  CHECK(percent(r.report.all().acc_b) == "40.9");
  CHECK(percent(r.report.all().oos_ratio) == "10.4");
  std::vector<MetricReport> reports = {r.report};
  const auto table = render_table(reports);
  CHECK(table.find("40.9") != std::string::npos);
  CHECK(table.find("10.4") != std::string::npos);
  CHECK(table.find("BY") != std::string::npos);
  CHECK(render_breakdown(r.report).find("All") != std::string::npos);
  CHECK(percent(0.0) == "0.0");
  CHECK(percent(1.0) == "100.0");
}

TEST_CASE("eval items round trip") {
  abstain::testing::TempDir dir;
  std::vector<EvalItem> items = {item("a", true), item("b", false)};
  save_eval_items(items, dir / "items.jsonl");
  const auto back = load_eval_items(dir / "items.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(to_json(back[1]) == to_json(items[1]));
  const auto fixture = load_eval_items(data_dir() / "smoke" / "eval_items.jsonl");
  CHECK(fixture.size() == 6);
}
