// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace abstain::cli {

/// Every tunable of every command. Values come from the built-in defaults,
/// then the config file, then ABSTAIN_* environment variables (endpoints
/// only), then command-line flags.
struct RunConfig {
  // Paths.
  std::string corpus;
  std::string images;
  std::string output;

  // Text perturbation.
  double epsilon = 0.4;
  double negation_epsilon = 0.4;
  std::size_t neighbors = 5;

  // Image perturbation.
  double alpha = 1.0;
  std::size_t top_n = 50;
  double min_score = 0.5;
  std::size_t max_objects = 1;

  std::uint64_t seed = 0;
  std::vector<std::string> kinds{"T1_word_replace", "T2_negation", "I1_image_replace",
                                 "I2_object_mask", "I3_copy_move"};

  // Backends: fixture files or HTTP endpoints.
  std::string word_embeddings;   // GloVe text format
  std::string lm_kind = "unigram";  // unigram | lookup | http
  std::string lm_table;
  std::string lm_endpoint;
  std::string tagger_table;
  std::string image_embeddings;  // JSON map ref -> vector
  std::string embedder_endpoint;
  std::string detections;        // JSON map ref -> objects
  std::string detector_endpoint;
  std::string model_endpoint;
  double timeout_seconds = 30.0;

  // Evaluation.
  std::string protocol = "BY";
  int shots_answerable = 0;
  int shots_unanswerable = 0;
  int concurrency = 4;
  int max_retries = 2;

  // Selective prediction.
  std::string variant = "CLS";
  double theta = 0.5;
  std::vector<double> grid;
  std::size_t answers = 0;
  double learning_rate = 0.1;
  int epochs = 200;
  double init_scale = 0.01;
  double l2 = 0.0;

  // Annotation.
  int responses_per_task = 3;
  int lease_seconds = 600;
};

nlohmann::json to_json(const RunConfig& config);

/// Overlays the keys present in `j` onto `config`; unknown keys throw.
void apply_json(RunConfig& config, const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

/// ABSTAIN_LM_ENDPOINT, ABSTAIN_EMBEDDER_ENDPOINT, ABSTAIN_DETECTOR_ENDPOINT,
/// ABSTAIN_MODEL_ENDPOINT.
void apply_env(RunConfig& config);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const Manifest& manifest);

/// Creates `dir`, or refuses (abstain::Error) when it already holds files
/// and `force` is false.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

}  // namespace abstain::cli
