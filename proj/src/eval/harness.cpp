// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/eval/harness.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "abstain/core/dataset.hpp"
#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/random.hpp"

namespace abstain::eval {

using nlohmann::json;

json to_json(const EvalItem& item) {
  json j{{"id", item.id},
         {"image", item.image_ref},
         {"question", item.question},
         {"answer_type", std::string(to_string(item.answer_type))},
         {"answerable", item.answerable},
         {"options", item.options},
         {"reason", nullptr}};
  if (item.reason) j["reason"] = std::string(annotation::code(*item.reason));
  return j;
}

EvalItem eval_item_from_json(const json& j) {
  EvalItem item;
  item.id = j.at("id").get<std::string>();
  item.image_ref = j.value("image", "");
  item.question = j.at("question").get<std::string>();
  item.answer_type = parse_answer_type(j.value("answer_type", "other"));
  item.answerable = j.at("answerable").get<bool>();
  item.options = j.at("options").get<std::array<std::string, 3>>();
  if (j.contains("reason") && !j["reason"].is_null()) {
    item.reason = annotation::parse_reason(j["reason"].get<std::string>());
  }
  if (item.id.empty() || item.question.empty()) throw Error("eval item needs an id and a question");
  return item;
}

std::vector<EvalItem> load_eval_items(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<EvalItem> out;
  std::vector<std::string> problems;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(eval_item_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      problems.push_back(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (!problems.empty()) throw ValidationError(problems);
  return out;
}

void save_eval_items(std::span<const EvalItem> items, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for (const auto& item : items) lines.push_back(to_json(item).dump());
  write_lines_locked(path, lines);
}

std::array<int, 4> mc_permutation(std::uint64_t seed, std::string_view item_id) {
  std::array<int, 4> perm{0, 1, 2, 3};
  Rng rng(derive_seed(seed, std::string("mc#") + std::string(item_id)));
  seeded_shuffle(std::span<int>(perm), rng);
  return perm;
}

McOptions mc_options(const EvalItem& item, const std::array<int, 4>& perm) {
  McOptions out;
  for (std::size_t i = 0; i < 4; ++i) {
    const int c = perm[i];
    out[i] = c == 3 ? std::string(kUnanswerableOption) : item.options[static_cast<std::size_t>(c)];
  }
  return out;
}

std::string item_prompt(const EvalItem& item, Protocol protocol, std::uint64_t seed) {
  switch (protocol) {
    case Protocol::kMC:
      return build_prompt(item.question, protocol, mc_options(item, mc_permutation(seed, item.id)));
    case Protocol::kOEH:
      return build_prompt(item.question, protocol, std::nullopt,
                          item.reason.value_or(annotation::Reason::kUnclear));
    default:
      return build_prompt(item.question, protocol);
  }
}

std::string expected_response(const EvalItem& item, Protocol protocol, std::uint64_t seed) {
  switch (protocol) {
    case Protocol::kBY:
      return item.answerable ? "answerable" : "unanswerable";
    case Protocol::kMC: {
      const auto perm = mc_permutation(seed, item.id);
      const int want = item.answerable ? 0 : 3;
      for (int i = 0; i < 4; ++i) {
        if (perm[static_cast<std::size_t>(i)] == want) return std::string(1, static_cast<char>('A' + i));
      }
      throw Error("mc permutation lost an option");
    }
    case Protocol::kOE:
    case Protocol::kOEH:
      return item.answerable ? item.options[0] : std::string(kUnanswerableOption);
  }
  throw Error("unknown protocol");
}

std::vector<ShotExemplar> make_exemplars(std::span<const EvalItem> pool, Protocol protocol,
                                         std::uint64_t seed) {
  std::vector<ShotExemplar> out;
  out.reserve(pool.size());
  for (const auto& item : pool) {
    out.push_back({item.id, item_prompt(item, protocol, seed),
                   expected_response(item, protocol, seed), item.answerable});
  }
  return out;
}

OracleClient::OracleClient(std::span<const EvalItem> items, Protocol protocol, std::uint64_t seed) {
  for (const auto& item : items) replies_[item.id] = expected_response(item, protocol, seed);
}

std::string OracleClient::complete(const ModelRequest& request) {
  auto it = replies_.find(request.id);
  if (it == replies_.end()) throw Error("oracle has no reply for '" + request.id + "'");
  return it->second;
}

ReplayClient ReplayClient::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, std::string> replies;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = json::parse(line);
    replies[j.at("id").get<std::string>()] = j.at("response").get<std::string>();
  }
  return ReplayClient(std::move(replies));
}

std::string ReplayClient::complete(const ModelRequest& request) {
  auto it = replies_.find(request.id);
  if (it == replies_.end()) throw Error("no recorded reply for '" + request.id + "'");
  return it->second;
}

json to_json(const EvalRecord& record) {
  json j{{"id", record.id},
         {"prompt", record.prompt},
         {"raw", record.raw},
         {"verdict", std::string(to_string(record.parsed.verdict))},
         {"parsed_text", record.parsed.text},
         {"correct", record.correct},
         {"attempts", record.attempts},
         {"answer_type", std::string(to_string(record.answer_type))},
         {"error", nullptr},
         {"exemplars", record.exemplar_ids}};
  if (record.parsed.verdict == VerdictKind::kChoice) j["choice"] = std::string(1, static_cast<char>('A' + record.parsed.choice));
  if (record.error) j["error"] = *record.error;
  if (record.mc_permutation) j["mc_permutation"] = *record.mc_permutation;
  return j;
}

namespace {

// Canonical option index behind an MC choice, or -1.
int mc_canonical(const EvalRecord& record) {
  if (record.parsed.verdict != VerdictKind::kChoice || !record.mc_permutation) return -1;
  return (*record.mc_permutation)[static_cast<std::size_t>(record.parsed.choice)];
}

// Predicted unanswerable (1), answerable (0) or neither (-1).
int predicted_answerability(const EvalRecord& record, Protocol protocol) {
  switch (record.parsed.verdict) {
    case VerdictKind::kAnswerable: return 0;
    case VerdictKind::kUnanswerable: return 1;
    case VerdictKind::kFreeText: return 0;
    case VerdictKind::kChoice: return protocol == Protocol::kMC ? (mc_canonical(record) == 3 ? 1 : 0) : -1;
    case VerdictKind::kOutOfScope: return -1;
  }
  return -1;
}

bool score(const EvalRecord& record, const EvalItem& item, Protocol protocol) {
  switch (protocol) {
    case Protocol::kBY:
      return predicted_answerability(record, protocol) == (item.answerable ? 0 : 1);
    case Protocol::kMC: {
      const int c = mc_canonical(record);
      return item.answerable ? (c >= 0 && c <= 2) : c == 3;
    }
    case Protocol::kOE:
    case Protocol::kOEH: {
      if (record.parsed.verdict == VerdictKind::kOutOfScope) return false;
      OpenGold gold;
      if (item.answerable) gold.valid.assign(item.options.begin(), item.options.end());
      gold.unanswerable = !item.answerable;
      return open_correct(record.parsed.text, gold);
    }
  }
  return false;
}

// Class labels for the weighted F1: the gold answer (original answer text or
// "unanswerable"; "answerable"/"unanswerable" for BY) against what the model
// committed to, with accepted alternatives credited to the gold class.
std::pair<std::string, std::string> f1_labels(const EvalRecord& record, const EvalItem& item,
                                              Protocol protocol) {
  std::string gold;
  if (protocol == Protocol::kBY) {
    gold = item.answerable ? "answerable" : "unanswerable";
  } else {
    gold = item.answerable ? normalize_open_answer(item.options[0]) : "unanswerable";
  }
  if (record.correct) return {gold, gold};
  if (record.parsed.verdict == VerdictKind::kOutOfScope) return {gold, "\x01oos"};
  if (protocol == Protocol::kMC) {
    const int c = mc_canonical(record);
    return {gold, c == 3 ? "unanswerable" : normalize_open_answer(record.parsed.text)};
  }
  return {gold, normalize_open_answer(record.parsed.text)};
}

}  // namespace

MetricReport aggregate(std::span<const EvalRecord> records, std::span<const EvalItem> items,
                       const EvalConfig& config, std::string client) {
  if (records.size() != items.size()) throw Error("aggregate: records/items length mismatch");
  MetricReport report;
  report.protocol = config.protocol;
  report.client = std::move(client);
  report.shots = config.shots;
  report.seed = config.seed;

  struct Bucket {
    MetricBlock block;
    std::size_t binary_correct = 0;
    std::vector<int> gold;
    std::vector<int> pred;
  };
  std::map<std::string, Bucket> buckets;
  for (auto t : {"yes-no", "number", "other", "all"}) buckets[t];
  std::map<std::string, int> class_ids;
  auto class_id = [&](const std::string& label) {
    return class_ids.emplace(label, static_cast<int>(class_ids.size())).first->second;
  };

  std::map<std::string, const EvalItem*> by_id;
  for (const auto& item : items) {
    if (!by_id.emplace(item.id, &item).second) throw Error("aggregate: duplicate item id '" + item.id + "'");
  }

  for (const auto& r : records) {
    const auto found = by_id.find(r.id);
    if (found == by_id.end()) throw Error("aggregate: record for unknown item '" + r.id + "'");
    const auto& item = *found->second;
    const auto [gold, pred] = f1_labels(r, item, config.protocol);
    const int answerability = predicted_answerability(r, config.protocol);
    for (auto* b : {&buckets[std::string(to_string(item.answer_type))], &buckets["all"]}) {
      auto& m = b->block;
      ++m.n;
      if (r.error) {
        ++m.errors;
      } else if (r.parsed.verdict == VerdictKind::kOutOfScope) {
        ++m.out_of_scope;
      } else if (r.correct) {
        ++m.correct;
      } else {
        ++m.incorrect;
      }
      b->binary_correct += answerability == (item.answerable ? 0 : 1);
      b->gold.push_back(class_id(gold));
      b->pred.push_back(class_id(pred));
    }
  }
  for (auto& [type, b] : buckets) {
    auto& m = b.block;
    if (m.n > 0) {
      const double n = static_cast<double>(m.n);
      m.acc_b = b.binary_correct / n;
      if (config.protocol != Protocol::kBY) m.acc_o = m.correct / n;
      m.f1_weighted = weighted_f1(b.pred, b.gold);
      m.oos_ratio = (m.out_of_scope + m.errors) / n;
    } else if (config.protocol != Protocol::kBY) {
      m.acc_o = 0.0;
    }
    report.breakdown[type] = m;
  }
  return report;
}

EvalResult run_eval(std::span<const EvalItem> items, ModelClient& client, const EvalConfig& config,
                    std::span<const EvalItem> exemplar_pool) {
  if (config.max_retries < 0) throw Error("run_eval: negative retry count");
  const auto exemplars = make_exemplars(exemplar_pool, config.protocol, config.seed);

  EvalResult result;
  result.records.resize(items.size());
  // Prompts are assembled up front so pool exhaustion fails before any request.
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& r = result.records[i];
    const auto& item = items[i];
    r.id = item.id;
    r.answer_type = item.answer_type;
    if (config.protocol == Protocol::kMC) r.mc_permutation = mc_permutation(config.seed, item.id);
    auto shot = assemble_few_shot(item_prompt(item, config.protocol, config.seed), config.shots,
                                  exemplars, item.id);
    r.prompt = std::move(shot.text);
    r.exemplar_ids = std::move(shot.exemplar_ids);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      auto& r = result.records[i];
      const auto& item = items[i];
      std::optional<McOptions> options;
      if (r.mc_permutation) options = mc_options(item, *r.mc_permutation);
      for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        r.attempts = attempt + 1;
        try {
          r.raw = client.complete({item.id, r.prompt, item.image_ref});
          r.error.reset();
          break;
        } catch (const std::exception& e) {
          r.error = e.what();
        }
      }
      r.parsed = r.error ? ParsedResponse{} : parse_response(r.raw, config.protocol, options);
      r.parsed.raw = r.raw;
      r.correct = !r.error && score(r, item, config.protocol);
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.concurrency));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, items.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  result.report = aggregate(result.records, items, config, client.name());
  return result;
}

json to_json(const MetricReport& report) {
  json breakdown = json::object();
  for (const auto& [type, m] : report.breakdown) {
    breakdown[type] = {{"n", m.n},
                       {"correct", m.correct},
                       {"incorrect", m.incorrect},
                       {"out_of_scope", m.out_of_scope},
                       {"errors", m.errors},
                       {"acc_b", m.acc_b},
                       {"acc_o", m.acc_o ? json(*m.acc_o) : json(nullptr)},
                       {"f1_weighted", m.f1_weighted},
                       {"oos_ratio", m.oos_ratio}};
  }
  return {{"protocol", std::string(to_string(report.protocol))},
          {"client", report.client},
          {"shots",
           {{"answerable", report.shots.n_answerable},
            {"unanswerable", report.shots.n_unanswerable},
            {"seed", report.shots.seed}}},
          {"seed", report.seed},
          {"breakdown", breakdown}};
}

MetricReport metric_report_from_json(const json& j) {
  MetricReport report;
  report.protocol = parse_protocol(j.at("protocol").get<std::string>());
  report.client = j.at("client").get<std::string>();
  report.shots.n_answerable = j.at("shots").at("answerable").get<int>();
  report.shots.n_unanswerable = j.at("shots").at("unanswerable").get<int>();
  report.shots.seed = j.at("shots").value("seed", std::uint64_t{0});
  report.seed = j.value("seed", std::uint64_t{0});
  for (const auto& [type, b] : j.at("breakdown").items()) {
    MetricBlock m;
    m.n = b.at("n").get<std::size_t>();
    m.correct = b.at("correct").get<std::size_t>();
    m.incorrect = b.at("incorrect").get<std::size_t>();
    m.out_of_scope = b.at("out_of_scope").get<std::size_t>();
    m.errors = b.at("errors").get<std::size_t>();
    m.acc_b = b.at("acc_b").get<double>();
    if (!b.at("acc_o").is_null()) m.acc_o = b.at("acc_o").get<double>();
    m.f1_weighted = b.at("f1_weighted").get<double>();
    m.oos_ratio = b.at("oos_ratio").get<double>();
    report.breakdown[type] = m;
  }
  if (!report.breakdown.count("all")) throw Error("metric report without an 'all' block");
  return report;
}

}  // namespace abstain::eval
