// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/cli/config.hpp"

#include <cstdlib>
#include <fstream>

#include <openssl/evp.h>

#include "abstain/core/error.hpp"

namespace abstain::cli {

using nlohmann::json;

#define ABSTAIN_CONFIG_FIELDS(X)                                                         \
  X(corpus) X(images) X(output) X(epsilon) X(negation_epsilon) X(neighbors) X(alpha)     \
  X(top_n) X(min_score) X(max_objects) X(seed) X(kinds) X(word_embeddings) X(lm_kind)    \
  X(lm_table) X(lm_endpoint) X(tagger_table) X(image_embeddings) X(embedder_endpoint)    \
  X(detections) X(detector_endpoint) X(model_endpoint) X(timeout_seconds) X(protocol)    \
  X(shots_answerable) X(shots_unanswerable) X(concurrency) X(max_retries) X(variant)     \
  X(theta) X(grid) X(answers) X(learning_rate) X(epochs) X(init_scale) X(l2)             \
  X(responses_per_task) X(lease_seconds)

json to_json(const RunConfig& config) {
  json j;
#define X(name) j[#name] = config.name;
  ABSTAIN_CONFIG_FIELDS(X)
#undef X
  return j;
}

void apply_json(RunConfig& config, const json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    try {
#define X(name)                                        \
  if (key == #name) {                                  \
    config.name = value.get<decltype(config.name)>();  \
    known = true;                                      \
  }
      ABSTAIN_CONFIG_FIELDS(X)
#undef X
    } catch (const json::exception& e) {
      throw Error("config key '" + key + "': " + e.what());
    }
    if (!known) throw Error("unknown config key '" + key + "'");
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  RunConfig config;
  try {
    apply_json(config, json::parse(in, nullptr, true, true));
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  // Relative paths in a config file are relative to the file itself.
  const auto base = path.parent_path();
  for (auto* field : {&config.corpus, &config.images, &config.output, &config.word_embeddings,
                      &config.lm_table, &config.tagger_table, &config.image_embeddings,
                      &config.detections}) {
    if (!field->empty() && std::filesystem::path(*field).is_relative()) {
      *field = (base / *field).lexically_normal().string();
    }
  }
  return config;
}

void apply_env(RunConfig& config) {
  const std::pair<const char*, std::string*> vars[] = {
      {"ABSTAIN_LM_ENDPOINT", &config.lm_endpoint},
      {"ABSTAIN_EMBEDDER_ENDPOINT", &config.embedder_endpoint},
      {"ABSTAIN_DETECTOR_ENDPOINT", &config.detector_endpoint},
      {"ABSTAIN_MODEL_ENDPOINT", &config.model_endpoint}};
  for (const auto& [name, field] : vars) {
    if (const char* v = std::getenv(name); v && *v) *field = v;
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 init failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

json to_json(const Manifest& manifest) {
  return {{"command", manifest.command}, {"argv", manifest.argv},
          {"config", manifest.config},   {"inputs", manifest.inputs},
          {"outputs", manifest.outputs}, {"extra", manifest.extra}};
}

void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (dir.empty()) throw Error("no output directory given");
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force) {
      throw Error(dir.string() + " is not empty; pass --force to overwrite");
    }
  }
  fs::create_directories(dir);
}

}  // namespace abstain::cli
