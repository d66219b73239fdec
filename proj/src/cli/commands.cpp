// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/cli/commands.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>

#include "abstain/annotation/analytics.hpp"
#include "abstain/annotation/consensus.hpp"
#include "abstain/annotation/exchange.hpp"
#include "abstain/annotation/task.hpp"
#include "abstain/cli/config.hpp"
#include "abstain/cli/http_backends.hpp"
#include "abstain/cli/service.hpp"
#include "abstain/core/dataset.hpp"
#include "abstain/core/error.hpp"
#include "abstain/eval/report.hpp"
#include "abstain/image/perturb_image.hpp"
#include "abstain/selective/calibration.hpp"
#include "abstain/selective/storage.hpp"
#include "abstain/text/embedding_table.hpp"
#include "abstain/text/perturb_text.hpp"

namespace abstain::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Shared state of one invocation.
struct Context {
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;
  RunConfig config;
  std::string config_path;
  bool force = false;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::vector<std::string> lines;
  lines.reserve(rows.size());
  for (const auto& r : rows) lines.push_back(r.dump());
  write_lines_locked(path, lines);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

// Records inputs and outputs, then writes manifest.json into `dir`.
class ManifestWriter {
 public:
  ManifestWriter(const Context& ctx, std::string command, fs::path dir)
      : dir_(std::move(dir)) {
    manifest_.command = std::move(command);
    manifest_.argv = ctx.argv;
    manifest_.config = to_json(ctx.config);
    if (!ctx.config_path.empty()) input(ctx.config_path);
  }
  void input(const fs::path& path) {
    if (!path.empty() && fs::is_regular_file(path)) manifest_.inputs[path.string()] = sha256_file(path);
  }
  void extra(const std::string& key, json value) { manifest_.extra[key] = std::move(value); }
  void finish() {
    for (const auto& entry : fs::recursive_directory_iterator(dir_)) {
      if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
      manifest_.outputs[fs::relative(entry.path(), dir_).generic_string()] = sha256_file(entry.path());
    }
    write_json(dir_ / "manifest.json", to_json(manifest_));
  }

 private:
  fs::path dir_;
  Manifest manifest_;
};

void require(const std::string& value, const char* what) {
  if (value.empty()) throw Error(std::string("missing required setting: ") + what);
}

// Flags that override config-file values. Each option writes into a
// scratch RunConfig; only options that were actually given are copied.
class Overrides {
 public:
  explicit Overrides(RunConfig& scratch) : scratch_(scratch) {}

  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T RunConfig::*field,
                   const std::string& help) {
    auto* opt = app->add_option(flag, scratch_.*field, help);
    items_.push_back({opt, [field, this](RunConfig& c) { c.*field = scratch_.*field; }});
    return opt;
  }

  void apply(RunConfig& config) const {
    for (const auto& [opt, copy] : items_) {
      if (opt->count() > 0) copy(config);
    }
  }

 private:
  RunConfig& scratch_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> items_;
};

// ---- perturb -------------------------------------------------------------

struct PerturbBackends {
  std::unique_ptr<text::PosTagger> tagger;
  std::unique_ptr<text::DependencyParser> parser;
  std::unique_ptr<text::LmScorer> scorer;
  text::EmbeddingTable embeddings;
  std::unique_ptr<image::ImageEmbedder> embedder;
  std::unique_ptr<image::ObjectDetector> detector;
};

PerturbBackends make_backends(const RunConfig& c, const std::set<std::string>& kinds,
                              ManifestWriter& manifest) {
  PerturbBackends b;
  if (!c.tagger_table.empty()) {
    b.tagger = std::make_unique<text::RuleTagger>(text::RuleTagger::from_table(c.tagger_table));
    manifest.input(c.tagger_table);
  } else {
    b.tagger = std::make_unique<text::RuleTagger>();
  }
  b.parser = std::make_unique<text::RuleDependencyParser>(*b.tagger);

  const bool text = kinds.count("T1_word_replace") || kinds.count("T2_negation");
  if (text) {
    if (c.lm_kind == "http") {
      require(c.lm_endpoint, "lm_endpoint");
      b.scorer = std::make_unique<HttpLmScorer>(c.lm_endpoint, c.timeout_seconds);
    } else if (c.lm_kind == "lookup") {
      require(c.lm_table, "lm_table");
      b.scorer = std::make_unique<text::LookupLmScorer>(text::LookupLmScorer::from_table(c.lm_table));
    } else if (c.lm_kind == "unigram") {
      require(c.lm_table, "lm_table");
      b.scorer = std::make_unique<text::UnigramLmScorer>(text::UnigramLmScorer::from_table(c.lm_table));
    } else {
      throw Error("lm_kind must be unigram, lookup or http");
    }
    manifest.input(c.lm_table);
  }
  if (kinds.count("T1_word_replace")) {
    require(c.word_embeddings, "word_embeddings");
    b.embeddings = text::EmbeddingTable::load_text(c.word_embeddings);
    manifest.input(c.word_embeddings);
  }
  if (kinds.count("I1_image_replace")) {
    if (!c.embedder_endpoint.empty()) {
      b.embedder = std::make_unique<HttpEmbedder>(c.embedder_endpoint, c.timeout_seconds);
    } else {
      require(c.image_embeddings, "image_embeddings or embedder_endpoint");
      b.embedder = std::make_unique<image::LookupEmbedder>(
          image::LookupEmbedder::from_json_file(c.image_embeddings));
      manifest.input(c.image_embeddings);
    }
  }
  const bool objects = kinds.count("I1_image_replace") || kinds.count("I2_object_mask") ||
                       kinds.count("I3_copy_move");
  if (objects) {
    if (!c.detector_endpoint.empty()) {
      b.detector = std::make_unique<HttpDetector>(c.detector_endpoint, c.timeout_seconds);
    } else {
      require(c.detections, "detections or detector_endpoint");
      b.detector = std::make_unique<image::FixtureDetector>(
          image::FixtureDetector::from_json_file(c.detections));
      manifest.input(c.detections);
    }
  }
  return b;
}

// Placeholder for runs without image replacement; never consulted.
class NoEmbedder final : public image::ImageEmbedder {
 public:
  image::ImageEmbedding embed(std::string_view) const override {
    throw Error("image replacement is disabled");
  }
};

json skip_json(const SkipEntry& s) {
  return {{"source_id", s.source_id}, {"stage", s.stage}, {"reason", s.reason}};
}

int cmd_perturb(Context& ctx) {
  const auto& c = ctx.config;
  require(c.corpus, "corpus");
  require(c.images, "images");
  require(c.output, "output");
  std::set<std::string> kinds;
  for (const auto& k : c.kinds) kinds.insert(std::string(to_string(parse_perturbation_kind(k))));

  const auto corpus = load_dataset(c.corpus);
  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "perturb", c.output);
  manifest.input(c.corpus);
  auto backends = make_backends(c, kinds, manifest);

  std::vector<SkipEntry> skips;
  const auto kept = filter_binary_answers(corpus);
  {
    std::set<std::string> kept_ids;
    for (const auto& i : kept) kept_ids.insert(i.id);
    for (const auto& i : corpus) {
      if (!kept_ids.count(i.id)) skips.push_back({i.id, "filter", "binary yes/no answer"});
    }
  }
  std::vector<const VqaInstance*> usable;
  for (const auto& i : kept) {
    if (!fs::is_regular_file(fs::path(c.images) / i.image_ref)) {
      skips.push_back({i.id, "input", "missing image file '" + i.image_ref + "'"});
    } else {
      usable.push_back(&i);
    }
  }

  std::vector<image::ImageEmbedding> pool;
  if (backends.embedder) {
    std::set<std::string> refs;
    for (const auto* i : usable) refs.insert(i->image_ref);
    for (const auto& ref : refs) {
      try {
        pool.push_back(backends.embedder->embed(ref));
      } catch (const std::exception& e) {
        skips.push_back({"", "embed", ref + ": " + e.what()});
      }
    }
  }

  text::TextPerturbConfig tc;
  tc.epsilon = c.epsilon;
  tc.negation_epsilon = c.negation_epsilon;
  tc.neighbors = c.neighbors;
  tc.word_replace = kinds.count("T1_word_replace") > 0;
  tc.negation = kinds.count("T2_negation") > 0;

  image::ImagePerturbConfig ic;
  ic.alpha = c.alpha;
  ic.top_n = c.top_n;
  ic.min_score = c.min_score;
  ic.max_objects = c.max_objects;
  ic.seed = c.seed;
  ic.replace = kinds.count("I1_image_replace") > 0;
  ic.mask = kinds.count("I2_object_mask") > 0;
  ic.copy_move = kinds.count("I3_copy_move") > 0;

  NoEmbedder no_embedder;
  image::FixtureDetector no_detector;
  image::FileImageStore store(c.images, c.output);
  std::vector<PerturbationRecord> records;
  for (const auto* instance : usable) {
    if (tc.word_replace || tc.negation) {
      auto outcome = text::perturb_text(
          *instance, tc, {*backends.tagger, *backends.parser, *backends.scorer, backends.embeddings});
      records.insert(records.end(), outcome.records.begin(), outcome.records.end());
      skips.insert(skips.end(), outcome.skips.begin(), outcome.skips.end());
    }
    if (ic.replace || ic.mask || ic.copy_move) {
      const image::ImageEmbedder& embedder = backends.embedder ? *backends.embedder : no_embedder;
      const image::ObjectDetector& detector = backends.detector ? *backends.detector : no_detector;
      auto outcome = image::perturb_image(*instance, ic, {embedder, detector, *backends.tagger, store, pool});
      records.insert(records.end(), outcome.records.begin(), outcome.records.end());
      skips.insert(skips.end(), outcome.skips.begin(), outcome.skips.end());
    }
  }

  save_records(records, fs::path(c.output) / "records.jsonl");
  std::vector<json> skip_rows;
  for (const auto& s : skips) skip_rows.push_back(skip_json(s));
  write_jsonl(fs::path(c.output) / "skips.jsonl", skip_rows);

  json by_kind = json::object();
  for (const auto& r : records) {
    auto& n = by_kind[std::string(to_string(r.kind))];
    n = n.is_null() ? 1 : n.get<int>() + 1;
  }
  const json summary{{"instances", corpus.size()},
                     {"binary_filtered", corpus.size() - kept.size()},
                     {"processed", usable.size()},
                     {"records", records.size()},
                     {"records_by_kind", by_kind},
                     {"skips", skips.size()}};
  write_json(fs::path(c.output) / "summary.json", summary);
  manifest.finish();
  ctx.out << summary.dump(2) << '\n';
  return kExitOk;
}

// ---- split ---------------------------------------------------------------

int cmd_split(Context& ctx, const std::vector<double>& ratios, const std::string& stratify_by) {
  const auto& c = ctx.config;
  require(c.corpus, "corpus");
  require(c.output, "output");
  if (ratios.size() != 3) throw Error("--ratios takes three values: train valid test");
  const auto corpus = load_dataset(c.corpus);
  std::function<std::string(const VqaInstance&)> group;
  if (stratify_by == "answer-type") {
    group = [](const VqaInstance& i) { return std::string(to_string(i.answer_type)); };
  } else if (stratify_by == "question-type") {
    group = [](const VqaInstance& i) { return i.question_type; };
  } else if (stratify_by != "none") {
    throw Error("--stratify-by must be none, answer-type or question-type");
  }
  const auto split = split_dataset(corpus, {ratios[0], ratios[1], ratios[2]}, c.seed, group);
  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "split", c.output);
  manifest.input(c.corpus);
  save_dataset(apply_split(corpus, split), fs::path(c.output) / "corpus.jsonl");
  write_json(fs::path(c.output) / "split.json", to_json(split));
  manifest.finish();
  ctx.out << "train " << split.train_ids.size() << ", valid " << split.valid_ids.size() << ", test "
          << split.test_ids.size() << '\n';
  return kExitOk;
}

// ---- annotate ------------------------------------------------------------

int cmd_annotate_export(Context& ctx, const std::string& records_path,
                        const std::string& baselines_path, const std::string& exemplars_path) {
  const auto& c = ctx.config;
  require(records_path, "records");
  require(c.corpus, "corpus");
  require(c.output, "output");
  const auto records = load_records(records_path);
  const auto corpus = load_dataset(c.corpus);
  std::map<std::string, const VqaInstance*> by_id;
  for (const auto& i : corpus) by_id[i.id] = &i;

  std::map<std::string, std::string> baselines;  // task id or "source|kind" -> answer
  if (!baselines_path.empty()) {
    for (const auto& row : read_jsonl(baselines_path)) {
      const auto answer = row.at("answer").get<std::string>();
      if (row.contains("task_id")) {
        baselines[row["task_id"].get<std::string>()] = answer;
      } else {
        baselines[row.at("source_id").get<std::string>() + "|" + row.at("kind").get<std::string>()] = answer;
      }
    }
  }
  std::vector<annotation::Exemplar> exemplars;
  if (!exemplars_path.empty()) {
    for (const auto& row : read_jsonl(exemplars_path)) {
      exemplars.push_back({row.at("image").get<std::string>(), row.at("question").get<std::string>(),
                           annotation::parse_reason(row.at("reason").get<std::string>())});
    }
  }

  std::vector<annotation::AnnotationTask> tasks;
  std::vector<json> warnings;
  for (const auto& r : records) {
    const auto id = annotation::make_task_id(r);
    auto src = by_id.find(r.source_id);
    if (src == by_id.end()) {
      warnings.push_back({{"task_id", id}, {"warning", "source instance not in corpus"}});
      continue;
    }
    std::optional<std::string> baseline = r.baseline_answer;
    if (auto it = baselines.find(id); it != baselines.end()) baseline = it->second;
    if (!baseline) {
      if (auto it = baselines.find(r.source_id + "|" + std::string(to_string(r.kind)));
          it != baselines.end()) {
        baseline = it->second;
      }
    }
    if (!baseline) {
      warnings.push_back({{"task_id", id}, {"warning", "no baseline answer"}});
      continue;
    }
    try {
      auto built = annotation::build_task(r, *src->second, *baseline, c.seed, corpus, exemplars);
      for (const auto& w : built.warnings) warnings.push_back({{"task_id", id}, {"warning", w}});
      tasks.push_back(std::move(built.task));
    } catch (const Error& e) {
      warnings.push_back({{"task_id", id}, {"warning", e.what()}});
    }
  }

  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "annotate export", c.output);
  manifest.input(records_path);
  manifest.input(c.corpus);
  manifest.input(baselines_path);
  manifest.input(exemplars_path);
  annotation::save_tasks(tasks, fs::path(c.output) / "tasks.jsonl");
  annotation::export_tasks(tasks, fs::path(c.output) / "tasks.csv");
  write_jsonl(fs::path(c.output) / "warnings.jsonl", warnings);
  manifest.finish();
  ctx.out << "exported " << tasks.size() << " task(s), " << warnings.size() << " warning(s)\n";
  return kExitOk;
}

int cmd_annotate_ingest(Context& ctx, const std::string& input) {
  const auto& c = ctx.config;
  require(input, "input");
  require(c.output, "output");
  const auto result = annotation::ingest_responses(input);
  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "annotate ingest", c.output);
  manifest.input(input);
  annotation::save_responses(result.accepted, fs::path(c.output) / "responses.jsonl");
  write_json(fs::path(c.output) / "rejects.json", result.rejected);
  manifest.finish();
  ctx.out << "accepted " << result.accepted.size() << ", rejected " << result.rejected.size() << '\n';
  for (const auto& r : result.rejected) ctx.err << r << '\n';
  return kExitOk;
}

int cmd_annotate_consensus(Context& ctx, const std::string& tasks_path,
                           const std::string& responses_path) {
  const auto& c = ctx.config;
  require(tasks_path, "tasks");
  require(responses_path, "responses");
  require(c.output, "output");
  const auto tasks = annotation::load_tasks(tasks_path);
  const auto responses = annotation::load_responses(responses_path);
  const auto grouped = annotation::group_by_task(responses);

  std::vector<annotation::ConsensusLabel> labels;
  std::vector<json> label_rows;
  std::vector<json> pending;
  std::vector<eval::EvalItem> items;
  std::map<std::string, std::string> kinds;
  for (const auto& task : tasks) {
    kinds[task.task_id] = std::string(to_string(task.kind));
    auto it = grouped.find(task.task_id);
    const std::size_t count = it == grouped.end() ? 0 : it->second.size();
    if (count < annotation::kMinAnnotators) {
      pending.push_back({{"task_id", task.task_id}, {"reason", "under-annotated"}, {"responses", count}});
      continue;
    }
    auto label = annotation::majority_vote(it->second);
    labels.push_back(label);
    json row = annotation::to_json(label);
    if (label.label == annotation::Verdict::kNoConsensus) {
      pending.push_back({{"task_id", task.task_id}, {"reason", "tie"}, {"responses", count}});
      label_rows.push_back(row);
      continue;
    }
    const auto answer = annotation::consensus_answer(it->second, label.label);
    row["answer"] = annotation::answer_text(answer, task);
    if (answer.option) row["answer_source"] = std::string(annotation::to_string(*answer.option));
    const auto reason = annotation::consensus_reason(it->second);
    row["reason"] = reason ? json(std::string(annotation::code(*reason))) : json(nullptr);
    label_rows.push_back(row);

    eval::EvalItem item;
    item.id = task.task_id;
    item.image_ref = task.image_ref;
    item.question = task.question;
    item.answer_type = task.answer_type;
    item.answerable = label.label == annotation::Verdict::kAnswerable;
    item.options = {task.option(annotation::OptionSource::kOriginal).text,
                    task.option(annotation::OptionSource::kBaseline).text,
                    task.option(annotation::OptionSource::kRandom).text};
    if (!item.answerable) item.reason = reason;
    items.push_back(std::move(item));
  }
  const auto report = annotation::analytics(responses, labels, kinds);

  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "annotate consensus", c.output);
  manifest.input(tasks_path);
  manifest.input(responses_path);
  write_jsonl(fs::path(c.output) / "consensus.jsonl", label_rows);
  write_jsonl(fs::path(c.output) / "pending.jsonl", pending);
  write_json(fs::path(c.output) / "analytics.json", annotation::to_json(report));
  eval::save_eval_items(items, fs::path(c.output) / "eval_items.jsonl");
  manifest.finish();
  ctx.out << "answerable " << report.consensus_counts[0] << ", unanswerable "
          << report.consensus_counts[1] << ", no-consensus " << report.consensus_counts[2]
          << ", under-annotated "
          << pending.size() - static_cast<std::size_t>(report.consensus_counts[2]) << '\n';
  return kExitOk;
}

HttpService* g_serving = nullptr;

void stop_serving(int) {
  if (g_serving) g_serving->stop();
}

int cmd_annotate_serve(Context& ctx, const std::string& tasks_path, const std::string& store_path,
                       const std::vector<std::string>& image_roots, const std::string& host,
                       int port) {
  const auto& c = ctx.config;
  require(tasks_path, "tasks");
  require(store_path, "responses");
  auto tasks = annotation::load_tasks(tasks_path);
  std::vector<annotation::AnnotatorResponse> existing;
  if (fs::exists(store_path)) existing = annotation::load_responses(store_path);
  AnnotationService service(std::move(tasks), std::move(existing),
                            {c.responses_per_task, std::chrono::seconds(c.lease_seconds), {}});
  service.on_stored([store_path](const annotation::AnnotatorResponse& r) {
    std::ofstream out(store_path, std::ios::app);
    out << annotation::to_json(r).dump() << '\n';
  });
  std::vector<fs::path> roots(image_roots.begin(), image_roots.end());
  if (!c.images.empty()) roots.emplace_back(c.images);
  HttpService http(service, roots);
  g_serving = &http;
  std::signal(SIGINT, stop_serving);
  std::signal(SIGTERM, stop_serving);
  ctx.out << "serving " << service.progress().at("tasks") << " task(s) on " << host << ":" << port
          << std::endl;
  http.run(host, port);
  g_serving = nullptr;
  return kExitOk;
}

// ---- select --------------------------------------------------------------

selective::TrainConfig train_config(const RunConfig& c) {
  selective::TrainConfig t;
  t.variant = selective::variant_from_string(c.variant);
  t.answers = c.answers;
  t.learning_rate = c.learning_rate;
  t.epochs = c.epochs;
  t.init_scale = c.init_scale;
  t.l2 = c.l2;
  t.seed = c.seed;
  return t;
}

int cmd_select_fit(Context& ctx, const std::string& features, const std::string& labels) {
  const auto& c = ctx.config;
  require(features, "features");
  require(labels, "labels");
  require(c.output, "output");
  const auto train = selective::join_labels(selective::load_features(features), selective::load_labels(labels));
  auto config = train_config(c);
  if (config.answers == 0) {
    for (const auto& ex : train) {
      if (ex.answer) config.answers = std::max(config.answers, *ex.answer + 1);
    }
  }
  const auto heads = selective::fit_selective(train, config);

  // Training-set diagnostics.
  std::size_t binary_correct = 0;
  std::size_t answer_correct = 0;
  std::size_t answerable = 0;
  double unanswerable_entropy = 0.0;
  std::size_t unanswerable = 0;
  for (const auto& ex : train) {
    const auto dist = selective::predict_answer(ex.feature, heads.classifier);
    if (heads.binary) {
      const bool said = selective::confidence_cls(ex.feature, *heads.binary) >= 0.5;
      binary_correct += said == ex.answer.has_value();
    }
    if (ex.answer) {
      ++answerable;
      answer_correct += dist.argmax() == *ex.answer;
    } else {
      ++unanswerable;
      unanswerable_entropy += selective::entropy(dist.probs);
    }
  }
  json stats{{"examples", train.size()}, {"answers", config.answers}, {"variant", c.variant}};
  if (heads.binary) stats["train_acc_b"] = static_cast<double>(binary_correct) / train.size();
  stats["train_answer_accuracy"] = answerable ? json(static_cast<double>(answer_correct) / answerable) : json(nullptr);
  stats["mean_unanswerable_entropy"] =
      unanswerable ? json(unanswerable_entropy / unanswerable) : json(nullptr);

  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "select fit", c.output);
  manifest.input(features);
  manifest.input(fs::path(features + ".json"));
  manifest.input(labels);
  selective::save_heads(fs::path(c.output) / "heads.json", heads);
  write_json(fs::path(c.output) / "fit.json", stats);
  manifest.finish();
  ctx.out << stats.dump(2) << '\n';
  return kExitOk;
}

std::vector<double> parse_grid(const RunConfig& c, const std::string& range) {
  if (range.empty()) return c.grid;
  // lo:hi:points
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= range.size()) {
    const auto end = range.find(':', start);
    parts.push_back(std::stod(range.substr(start, end - start)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (parts.size() != 3 || parts[2] < 1) throw Error("--grid-range expects lo:hi:points");
  return selective::linear_grid(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

int cmd_select_calibrate(Context& ctx, const std::string& heads_path, const std::string& features,
                         const std::string& labels, const std::string& range) {
  const auto& c = ctx.config;
  require(heads_path, "heads");
  require(features, "features");
  require(labels, "labels");
  require(c.output, "output");
  const auto heads = selective::load_heads(heads_path);
  const auto valid = selective::join_labels(selective::load_features(features), selective::load_labels(labels));
  const auto grid = parse_grid(c, range);
  std::vector<selective::ScoredExample> scored;
  for (const auto& ex : valid) {
    auto [dist, confidence] = heads.score(ex.feature);
    scored.push_back({std::move(dist), confidence, ex.answer});
  }
  const auto calibration = selective::calibrate_threshold(scored, heads.variant, grid);
  json curve = json::array();
  for (const auto& p : calibration.curve) {
    curve.push_back({{"theta", p.theta}, {"acc_o", p.accuracy}, {"coverage", p.coverage}});
  }
  const json result{{"variant", std::string(selective::to_string(heads.variant))},
                    {"theta", calibration.theta},
                    {"curve", curve}};
  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "select calibrate", c.output);
  manifest.input(heads_path);
  manifest.input(features);
  manifest.input(labels);
  write_json(fs::path(c.output) / "calibration.json", result);
  manifest.finish();
  ctx.out << "theta " << calibration.theta << '\n';
  return kExitOk;
}

int cmd_select_infer(Context& ctx, const std::string& heads_path, const std::string& features) {
  const auto& c = ctx.config;
  require(heads_path, "heads");
  require(features, "features");
  require(c.output, "output");
  const auto heads = selective::load_heads(heads_path);
  const auto rows = selective::load_features(features);
  std::vector<json> out;
  std::size_t answered = 0;
  for (const auto& f : rows) {
    const auto result = heads.infer(f, c.theta);
    answered += !result.abstained();
    out.push_back({{"id", f.id},
                   {"answer", result.answer ? json(*result.answer) : json(nullptr)},
                   {"abstain", result.abstained()},
                   {"confidence", result.confidence}});
  }
  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "select infer", c.output);
  manifest.input(heads_path);
  manifest.input(features);
  write_jsonl(fs::path(c.output) / "predictions.jsonl", out);
  manifest.finish();
  ctx.out << "answered " << answered << " of " << rows.size() << ", abstained "
          << rows.size() - answered << '\n';
  return kExitOk;
}

// ---- eval / report -------------------------------------------------------

int cmd_eval(Context& ctx, const std::string& items_path, const std::string& client_kind,
             const std::string& replies, const std::string& pool_path) {
  const auto& c = ctx.config;
  require(items_path, "items");
  require(c.output, "output");
  const auto items = eval::load_eval_items(items_path);
  std::vector<eval::EvalItem> pool;
  if (!pool_path.empty()) pool = eval::load_eval_items(pool_path);

  eval::EvalConfig config;
  config.protocol = eval::parse_protocol(c.protocol);
  config.shots = {c.shots_answerable, c.shots_unanswerable, c.seed};
  config.seed = c.seed;
  config.max_retries = c.max_retries;
  config.concurrency = c.concurrency;

  std::unique_ptr<eval::ModelClient> client;
  if (client_kind == "oracle") {
    client = std::make_unique<eval::OracleClient>(items, config.protocol, config.seed);
  } else if (client_kind == "empty") {
    client = std::make_unique<eval::EmptyClient>();
  } else if (client_kind == "replay") {
    require(replies, "replies");
    client = std::make_unique<eval::ReplayClient>(eval::ReplayClient::load(replies));
  } else if (client_kind == "http") {
    require(c.model_endpoint, "model_endpoint");
    client = std::make_unique<HttpModelClient>(c.model_endpoint, c.timeout_seconds);
  } else {
    throw Error("--client must be oracle, empty, replay or http");
  }

  prepare_output_dir(c.output, ctx.force);
  ManifestWriter manifest(ctx, "eval", c.output);
  manifest.input(items_path);
  manifest.input(pool_path);
  manifest.input(replies);
  const auto result = eval::run_eval(items, *client, config, pool);

  std::vector<json> rows;
  for (const auto& r : result.records) rows.push_back(eval::to_json(r));
  write_jsonl(fs::path(c.output) / "responses.jsonl", rows);
  write_json(fs::path(c.output) / "report.json", eval::to_json(result.report));
  const std::vector<eval::MetricReport> one{result.report};
  const auto table = eval::render_table(one) + "\n" + eval::render_breakdown(result.report);
  std::ofstream(fs::path(c.output) / "table.txt") << table;
  manifest.extra("client", client->name());
  manifest.extra("shots", {{"answerable", config.shots.n_answerable},
                           {"unanswerable", config.shots.n_unanswerable},
                           {"total", config.shots.total()}});
  manifest.extra("lexicon_version", eval::kRefusalLexiconVersion);
  manifest.finish();
  ctx.out << table;
  return kExitOk;
}

int cmd_report(Context& ctx, const std::vector<std::string>& inputs, const std::string& out_file) {
  if (inputs.empty()) throw Error("report needs at least one input");
  std::vector<eval::MetricReport> reports;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "report.json";
    reports.push_back(eval::metric_report_from_json(read_json_file(p)));
  }
  const auto table = eval::render_table(reports);
  if (!out_file.empty()) {
    if (fs::exists(out_file) && !ctx.force) throw Error(out_file + " exists; pass --force to overwrite");
    std::ofstream(out_file) << table;
  }
  ctx.out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unanswerable visual question toolkit", "abstain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "abstain 0.1.0");

  Context ctx{{args.begin(), args.end()}, out, err, {}, {}, false};
  RunConfig scratch;
  Overrides overrides(scratch);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.config_path, "JSON config file");
    sub->add_flag("--force", ctx.force, "overwrite a non-empty output directory");
    overrides.add(sub, "--out", &RunConfig::output, "output directory");
    overrides.add(sub, "--seed", &RunConfig::seed, "random seed");
  };

  std::function<int()> action;

  auto* perturb = app.add_subcommand("perturb", "synthesize perturbation records");
  common(perturb);
  overrides.add(perturb, "--corpus", &RunConfig::corpus, "corpus JSONL");
  overrides.add(perturb, "--images", &RunConfig::images, "image root");
  overrides.add(perturb, "--epsilon", &RunConfig::epsilon, "LM filter tolerance");
  overrides.add(perturb, "--neighbors", &RunConfig::neighbors, "embedding neighbours per anchor");
  overrides.add(perturb, "--alpha", &RunConfig::alpha, "overlap score weight");
  overrides.add(perturb, "--top-n", &RunConfig::top_n, "replacement candidates");
  overrides.add(perturb, "--max-objects", &RunConfig::max_objects, "object edits per instance");
  overrides.add(perturb, "--kinds", &RunConfig::kinds, "perturbation kinds to run");
  overrides.add(perturb, "--word-embeddings", &RunConfig::word_embeddings, "GloVe text file");
  overrides.add(perturb, "--lm", &RunConfig::lm_kind, "unigram | lookup | http");
  overrides.add(perturb, "--lm-table", &RunConfig::lm_table, "LM table file");
  overrides.add(perturb, "--tagger-table", &RunConfig::tagger_table, "POS override table");
  overrides.add(perturb, "--image-embeddings", &RunConfig::image_embeddings, "image vectors JSON");
  overrides.add(perturb, "--detections", &RunConfig::detections, "detections JSON");
  perturb->callback([&] { action = [&] { return cmd_perturb(ctx); }; });

  std::vector<double> ratios{0.7, 0.1, 0.2};
  std::string stratify_by = "none";
  auto* split = app.add_subcommand("split", "assign train/valid/test splits");
  common(split);
  overrides.add(split, "--corpus", &RunConfig::corpus, "corpus JSONL");
  split->add_option("--ratios", ratios, "train valid test")->expected(3);
  split->add_option("--stratify-by", stratify_by, "none | answer-type | question-type");
  split->callback([&] { action = [&] { return cmd_split(ctx, ratios, stratify_by); }; });

  auto* annotate = app.add_subcommand("annotate", "labeling workflow");
  annotate->require_subcommand(1);
  std::string records, baselines, exemplars, input, tasks, responses, host = "127.0.0.1";
  std::vector<std::string> image_roots;
  int port = 8080;

  auto* exp = annotate->add_subcommand("export", "build annotation tasks");
  common(exp);
  exp->add_option("--records", records, "perturbation records JSONL")->required();
  overrides.add(exp, "--corpus", &RunConfig::corpus, "corpus JSONL");
  exp->add_option("--baselines", baselines, "baseline answers JSONL");
  exp->add_option("--exemplars", exemplars, "exemplar JSONL");
  exp->callback([&] { action = [&] { return cmd_annotate_export(ctx, records, baselines, exemplars); }; });

  auto* ingest = annotate->add_subcommand("ingest", "validate returned responses");
  common(ingest);
  ingest->add_option("--input", input, "responses CSV or JSONL")->required();
  ingest->callback([&] { action = [&] { return cmd_annotate_ingest(ctx, input); }; });

  auto* consensus = annotate->add_subcommand("consensus", "majority vote and analytics");
  common(consensus);
  consensus->add_option("--tasks", tasks, "tasks JSONL or CSV")->required();
  consensus->add_option("--responses", responses, "responses JSONL or CSV")->required();
  consensus->callback([&] { action = [&] { return cmd_annotate_consensus(ctx, tasks, responses); }; });

  auto* serve = annotate->add_subcommand("serve", "HTTP task service");
  serve->add_option("--config", ctx.config_path, "JSON config file");
  serve->add_option("--tasks", tasks, "tasks JSONL or CSV")->required();
  serve->add_option("--responses", responses, "response store (JSONL, appended)")->required();
  serve->add_option("--image-root", image_roots, "directories served under /images");
  overrides.add(serve, "--images", &RunConfig::images, "image root");
  overrides.add(serve, "--lease-seconds", &RunConfig::lease_seconds, "lease length");
  overrides.add(serve, "--responses-per-task", &RunConfig::responses_per_task, "annotators per task");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");
  serve->callback([&] {
    action = [&] { return cmd_annotate_serve(ctx, tasks, responses, image_roots, host, port); };
  });

  auto* select = app.add_subcommand("select", "selective prediction heads");
  select->require_subcommand(1);
  std::string features, labels, heads, grid_range;

  auto* fit = select->add_subcommand("fit", "train selective heads");
  common(fit);
  fit->add_option("--features", features, "feature matrix")->required();
  fit->add_option("--labels", labels, "labels JSONL")->required();
  overrides.add(fit, "--variant", &RunConfig::variant, "CLS | ENT | MAXLOGIT");
  overrides.add(fit, "--answers", &RunConfig::answers, "answer set size");
  overrides.add(fit, "--learning-rate", &RunConfig::learning_rate, "SGD step");
  overrides.add(fit, "--epochs", &RunConfig::epochs, "passes over the data");
  overrides.add(fit, "--init-scale", &RunConfig::init_scale, "initial weight stddev");
  overrides.add(fit, "--l2", &RunConfig::l2, "weight decay");
  fit->callback([&] { action = [&] { return cmd_select_fit(ctx, features, labels); }; });

  auto* calibrate = select->add_subcommand("calibrate", "sweep the threshold");
  common(calibrate);
  calibrate->add_option("--heads", heads, "heads.json")->required();
  calibrate->add_option("--features", features, "feature matrix")->required();
  calibrate->add_option("--labels", labels, "labels JSONL")->required();
  overrides.add(calibrate, "--grid", &RunConfig::grid, "threshold values");
  calibrate->add_option("--grid-range", grid_range, "lo:hi:points");
  calibrate->callback([&] {
    action = [&] { return cmd_select_calibrate(ctx, heads, features, labels, grid_range); };
  });

  auto* infer = select->add_subcommand("infer", "answer or abstain");
  common(infer);
  infer->add_option("--heads", heads, "heads.json")->required();
  infer->add_option("--features", features, "feature matrix")->required();
  overrides.add(infer, "--theta", &RunConfig::theta, "threshold");
  infer->callback([&] { action = [&] { return cmd_select_infer(ctx, heads, features); }; });

  std::string items, client = "oracle", replies, pool;
  auto* ev = app.add_subcommand("eval", "run a probe protocol");
  common(ev);
  ev->add_option("--items", items, "eval items JSONL")->required();
  overrides.add(ev, "--protocol", &RunConfig::protocol, "BY | MC | OE | OEH");
  ev->add_option("--client", client, "oracle | empty | replay | http");
  ev->add_option("--replies", replies, "replay JSONL {id, response}");
  ev->add_option("--pool", pool, "few-shot exemplar items JSONL");
  overrides.add(ev, "--shots-answerable", &RunConfig::shots_answerable, "answerable exemplars");
  overrides.add(ev, "--shots-unanswerable", &RunConfig::shots_unanswerable, "unanswerable exemplars");
  overrides.add(ev, "--concurrency", &RunConfig::concurrency, "requests in flight");
  overrides.add(ev, "--max-retries", &RunConfig::max_retries, "retries per request");
  ev->callback([&] { action = [&] { return cmd_eval(ctx, items, client, replies, pool); }; });

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "render metric reports as a table");
  report->add_option("inputs", report_inputs, "report.json files or eval output dirs")->required();
  report->add_option("--out", report_out, "also write the table here");
  report->add_flag("--force", ctx.force, "overwrite --out");
  report->callback([&] { action = [&] { return cmd_report(ctx, report_inputs, report_out); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("abstain");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!ctx.config_path.empty()) ctx.config = load_config(ctx.config_path);
    apply_env(ctx.config);
    overrides.apply(ctx.config);
    return action ? action() : kExitUsage;
  } catch (const std::exception& e) {
    json error{{"error", e.what()}};
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) error["diagnostics"] = v->diagnostics();
    err << error.dump() << '\n';
    return kExitFatal;
  }
}

}  // namespace abstain::cli
