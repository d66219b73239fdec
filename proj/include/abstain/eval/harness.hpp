// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "abstain/core/types.hpp"
#include "abstain/eval/metrics.hpp"

namespace abstain::eval {

/// One probe instance with its consensus outcome.
struct EvalItem {
  std::string id;
  std::string image_ref;
  std::string question;
  AnswerType answer_type = AnswerType::kOther;
  bool answerable = true;
  std::array<std::string, 3> options;  // original, baseline, random
  std::optional<annotation::Reason> reason;
};

nlohmann::json to_json(const EvalItem& item);
EvalItem eval_item_from_json(const nlohmann::json& j);
std::vector<EvalItem> load_eval_items(const std::filesystem::path& path);
void save_eval_items(std::span<const EvalItem> items, const std::filesystem::path& path);

inline constexpr std::string_view kUnanswerableOption = "unanswerable";

/// Display order of the MC options: perm[i] is the canonical index (0..2 the
/// answer options, 3 "unanswerable") shown at letter i.
std::array<int, 4> mc_permutation(std::uint64_t seed, std::string_view item_id);
McOptions mc_options(const EvalItem& item, const std::array<int, 4>& perm);

/// The protocol prompt for an item, before any few-shot prefix. OEH falls
/// back to the first reason when the item carries none.
std::string item_prompt(const EvalItem& item, Protocol protocol, std::uint64_t seed);

/// The gold reply: "answerable"/"unanswerable", the letter of the original
/// answer (or of "unanswerable"), or the original answer text.
std::string expected_response(const EvalItem& item, Protocol protocol, std::uint64_t seed);

std::vector<ShotExemplar> make_exemplars(std::span<const EvalItem> pool, Protocol protocol,
                                         std::uint64_t seed);

struct ModelRequest {
  std::string id;
  std::string prompt;
  std::string image_ref;
};

/// Text+image in, text out. Implementations must tolerate concurrent calls
/// and throw on failure or timeout.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const ModelRequest& request) = 0;
};

/// Replies with the gold response of every item it was built from.
class OracleClient : public ModelClient {
 public:
  OracleClient(std::span<const EvalItem> items, Protocol protocol, std::uint64_t seed);
  std::string name() const override { return "oracle"; }
  std::string complete(const ModelRequest& request) override;

 private:
  std::map<std::string, std::string> replies_;
};

class EmptyClient : public ModelClient {
 public:
  std::string name() const override { return "empty"; }
  std::string complete(const ModelRequest&) override { return {}; }
};

/// Canned replies by item id, from JSON lines {"id", "response"}; an
/// unknown id throws like a failed request.
class ReplayClient : public ModelClient {
 public:
  explicit ReplayClient(std::map<std::string, std::string> replies) : replies_(std::move(replies)) {}
  static ReplayClient load(const std::filesystem::path& path);
  std::string name() const override { return "replay"; }
  std::string complete(const ModelRequest& request) override;

 private:
  std::map<std::string, std::string> replies_;
};

struct EvalConfig {
  Protocol protocol = Protocol::kBY;
  ShotConfig shots;
  std::uint64_t seed = 0;
  int max_retries = 2;
  int concurrency = 4;
};

struct EvalRecord {
  std::string id;
  std::string prompt;
  std::string raw;
  ParsedResponse parsed;
  bool correct = false;
  std::optional<std::string> error;  // set when every attempt failed
  int attempts = 0;
  AnswerType answer_type = AnswerType::kOther;
  std::optional<std::array<int, 4>> mc_permutation;
  std::vector<std::string> exemplar_ids;
};

nlohmann::json to_json(const EvalRecord& record);

struct MetricBlock {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t out_of_scope = 0;  // unparseable replies
  std::size_t errors = 0;        // failed requests, also out of scope
  double acc_b = 0.0;
  std::optional<double> acc_o;  // not defined for BY
  double f1_weighted = 0.0;
  double oos_ratio = 0.0;  // (out_of_scope + errors) / n
};

struct MetricReport {
  Protocol protocol = Protocol::kBY;
  std::string client;
  ShotConfig shots;
  std::uint64_t seed = 0;
  std::map<std::string, MetricBlock> breakdown;  // "yes-no", "number", "other", "all"

  const MetricBlock& all() const { return breakdown.at("all"); }
};

nlohmann::json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const nlohmann::json& j);

struct EvalResult {
  MetricReport report;
  std::vector<EvalRecord> records;  // item order
};

/// Prompts, queries (bounded concurrency, retries), parses and scores every
/// item. Few-shot exemplars come from `exemplar_pool`.
EvalResult run_eval(std::span<const EvalItem> items, ModelClient& client, const EvalConfig& config,
                    std::span<const EvalItem> exemplar_pool = {});

/// Scores already-collected records; order-independent.
MetricReport aggregate(std::span<const EvalRecord> records, std::span<const EvalItem> items,
                       const EvalConfig& config, std::string client);

}  // namespace abstain::eval
