// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/annotation/exchange.hpp"

#include <fstream>
#include <sstream>

#include "abstain/core/csv.hpp"
#include "abstain/core/dataset.hpp"
#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"

namespace abstain::annotation {
namespace {

const std::vector<std::string> kTaskHeader = {
    "task_id",       "source_id",     "kind",      "image",          "question",   "question_type",
    "answer_type",   "option_original", "option_baseline", "option_random", "exemplars"};

const std::vector<std::string> kResponseHeader = {
    "task_id", "worker_id", "answerable", "reason", "unanswerable_answer",
    "altered_element", "chosen_answer", "confidence"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void expect_header(const std::vector<std::vector<std::string>>& rows,
                   const std::vector<std::string>& header, const std::filesystem::path& path) {
  if (rows.empty() || rows.front() != header) {
    throw Error(path.string() + ": header must be " + csv::format_row(header));
  }
}

bool parse_bool(const std::string& text) {
  const auto t = to_lower(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw Error("answerable must be true/false, got '" + text + "'");
}

int parse_confidence(const std::string& text) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw Error("confidence must be an integer, got '" + text + "'");
  }
  if (used != text.size()) throw Error("confidence must be an integer, got '" + text + "'");
  return value;
}

}  // namespace

void export_tasks(std::span<const AnnotationTask> tasks, const std::filesystem::path& path) {
  std::vector<std::string> lines = {csv::format_row(kTaskHeader)};
  for (const auto& t : tasks) {
    nlohmann::json exemplars = to_json(t)["exemplars"];
    const std::vector<std::string> row = {
        t.task_id, t.source_id, std::string(to_string(t.kind)), t.image_ref, t.question,
        t.question_type, std::string(to_string(t.answer_type)),
        t.option(OptionSource::kOriginal).text, t.option(OptionSource::kBaseline).text,
        t.option(OptionSource::kRandom).text, exemplars.dump()};
    lines.push_back(csv::format_row(row));
  }
  write_lines_locked(path, lines);
}

std::vector<AnnotationTask> load_tasks_csv(const std::filesystem::path& path) {
  const auto rows = csv::parse(read_file(path));
  expect_header(rows, kTaskHeader, path);
  std::vector<AnnotationTask> out;
  std::vector<std::string> diagnostics;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    try {
      if (r.size() != kTaskHeader.size()) throw Error("expected 11 fields");
      nlohmann::json j = {{"task_id", r[0]},       {"source_id", r[1]},   {"kind", r[2]},
                          {"image", r[3]},         {"question", r[4]},    {"question_type", r[5]},
                          {"answer_type", r[6]},
                          {"exemplars", r[10].empty() ? nlohmann::json::array() : nlohmann::json::parse(r[10])},
                          {"options", {{{"text", r[7]}, {"source", "original"}},
                                       {{"text", r[8]}, {"source", "baseline"}},
                                       {{"text", r[9]}, {"source", "random"}}}}};
      out.push_back(task_from_json(j));
    } catch (const std::exception& e) {
      diagnostics.push_back("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return out;
}

void save_tasks(std::span<const AnnotationTask> tasks, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for (const auto& t : tasks) lines.push_back(to_json(t).dump());
  write_lines_locked(path, lines);
}

std::vector<AnnotationTask> load_tasks(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return load_tasks_csv(path);
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<AnnotationTask> out;
  std::vector<std::string> diagnostics;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(task_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      diagnostics.push_back("line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return out;
}

void export_responses(std::span<const AnnotatorResponse> responses,
                      const std::filesystem::path& path) {
  std::vector<std::string> lines = {csv::format_row(kResponseHeader)};
  for (const auto& r : responses) {
    const std::vector<std::string> row = {
        r.task_id,
        r.worker_id,
        r.answerable ? "true" : "false",
        r.reason ? std::string(code(*r.reason)) : "",
        r.refusal ? std::string(code(*r.refusal)) : "",
        r.altered_element ? std::string(to_string(*r.altered_element)) : "",
        r.chosen_answer ? std::string(to_string(*r.chosen_answer)) : "",
        std::to_string(r.confidence)};
    lines.push_back(csv::format_row(row));
  }
  write_lines_locked(path, lines);
}

IngestResult ingest_responses(const std::filesystem::path& path) {
  const auto rows = csv::parse(read_file(path));
  expect_header(rows, kResponseHeader, path);
  IngestResult out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    try {
      if (r.size() != kResponseHeader.size()) {
        throw Error("expected " + std::to_string(kResponseHeader.size()) + " fields, got " +
                    std::to_string(r.size()));
      }
      AnnotatorResponse resp;
      resp.task_id = r[0];
      resp.worker_id = r[1];
      resp.answerable = parse_bool(r[2]);
      if (!r[3].empty()) resp.reason = parse_reason(r[3]);
      if (!r[4].empty()) resp.refusal = parse_refusal(r[4]);
      if (!r[5].empty()) resp.altered_element = parse_altered_element(r[5]);
      if (!r[6].empty()) resp.chosen_answer = parse_option_source(r[6]);
      resp.confidence = parse_confidence(r[7]);
      validate(resp);
      out.accepted.push_back(std::move(resp));
    } catch (const Error& e) {
      out.rejected.push_back("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

void save_responses(std::span<const AnnotatorResponse> responses,
                    const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for (const auto& r : responses) lines.push_back(to_json(r).dump());
  write_lines_locked(path, lines);
}

std::vector<AnnotatorResponse> load_responses(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    auto result = ingest_responses(path);
    if (!result.rejected.empty()) throw ValidationError(std::move(result.rejected));
    return std::move(result.accepted);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<AnnotatorResponse> out;
  std::vector<std::string> diagnostics;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(response_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      diagnostics.push_back("line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return out;
}

}  // namespace abstain::annotation
