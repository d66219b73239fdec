// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/annotation/task.hpp"

#include <cstdio>
#include <map>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/random.hpp"

namespace abstain::annotation {
namespace {

// Normalized answer -> first spelling seen, sorted so draws are reproducible.
using AnswerPool = std::map<std::string, std::string>;

AnswerPool answer_pool(std::span<const VqaInstance> corpus, const std::string* question_type,
                       const std::string& exclude_a, const std::string& exclude_b) {
  AnswerPool pool;
  for (const auto& i : corpus) {
    if (question_type && i.question_type != *question_type) continue;
    const auto answer = primary_answer(i);
    const auto key = normalize_answer(answer);
    if (key.empty() || key == exclude_a || key == exclude_b) continue;
    pool.emplace(key, answer);
  }
  return pool;
}

}  // namespace

std::string make_task_id(const PerturbationRecord& record) {
  const auto artifact = record.perturbed_question.value_or(record.perturbed_image_ref.value_or(""));
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08llx",
                static_cast<unsigned long long>(derive_seed(0, artifact) & 0xffffffffULL));
  return record.source_id + "/" + std::string(to_string(record.kind)) + "/" + hex;
}

BuiltTask build_task(const PerturbationRecord& record, const VqaInstance& source,
                     const std::string& baseline_answer, std::uint64_t seed,
                     std::span<const VqaInstance> corpus, std::span<const Exemplar> exemplars) {
  validate(record);
  if (record.source_id != source.id) {
    throw Error("record source " + record.source_id + " does not match instance " + source.id);
  }
  const auto original = primary_answer(source);
  const auto original_key = normalize_answer(original);
  const auto baseline_key = normalize_answer(baseline_answer);
  if (baseline_key.empty()) throw Error("task for " + source.id + ": empty baseline answer");
  if (baseline_key == original_key) {
    throw Error("task for " + source.id + ": baseline answer coincides with the original answer");
  }

  BuiltTask out;
  auto pool = answer_pool(corpus, &source.question_type, original_key, baseline_key);
  if (pool.empty()) {
    out.warnings.push_back("no distinct answer for question type '" + source.question_type +
                           "'; drew the random option corpus-wide");
    pool = answer_pool(corpus, nullptr, original_key, baseline_key);
  }
  if (pool.empty()) throw Error("task for " + source.id + ": corpus has no distinct random answer");

  Rng rng(derive_seed(seed, make_task_id(record)));
  auto it = pool.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(uniform_index(rng, pool.size())));

  auto& task = out.task;
  task.task_id = make_task_id(record);
  task.source_id = source.id;
  task.kind = record.kind;
  task.image_ref = record.perturbed_image_ref.value_or(source.image_ref);
  task.question = record.perturbed_question.value_or(source.question);
  task.question_type = source.question_type;
  task.answer_type = source.answer_type;
  task.exemplars.assign(exemplars.begin(), exemplars.end());
  task.options = {AnswerOption{original, OptionSource::kOriginal},
                  AnswerOption{baseline_answer, OptionSource::kBaseline},
                  AnswerOption{it->second, OptionSource::kRandom}};
  return out;
}

}  // namespace abstain::annotation
