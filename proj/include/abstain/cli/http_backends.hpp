// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "abstain/eval/harness.hpp"
#include "abstain/image/backends.hpp"
#include "abstain/text/backends.hpp"

namespace abstain::cli {

/// "http://host:port/path" split into the base URL and the path.
struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url);

/// JSON over HTTP adapters. Each POSTs one request object and expects one
/// response object; non-2xx replies and transport failures throw.
///
///   LM scorer:  {"text"}           -> {"nll"}
///   embedder:   {"image"}          -> {"vector"}
///   detector:   {"image"}          -> {"objects": [{"label", "bbox", "score"}]}
///   model:      {"id", "prompt", "image"} -> {"text"}
class HttpLmScorer final : public text::LmScorer {
 public:
  HttpLmScorer(std::string url, double timeout_seconds);
  double score(std::string_view text) const override;

 private:
  Endpoint endpoint_;
  double timeout_;
};

class HttpEmbedder final : public image::ImageEmbedder {
 public:
  HttpEmbedder(std::string url, double timeout_seconds);
  image::ImageEmbedding embed(std::string_view image_ref) const override;

 private:
  Endpoint endpoint_;
  double timeout_;
};

class HttpDetector final : public image::ObjectDetector {
 public:
  HttpDetector(std::string url, double timeout_seconds);
  image::ObjectDetection detect(std::string_view image_ref) const override;

 private:
  Endpoint endpoint_;
  double timeout_;
};

class HttpModelClient final : public eval::ModelClient {
 public:
  HttpModelClient(std::string url, double timeout_seconds);
  std::string name() const override { return "http:" + endpoint_.base + endpoint_.path; }
  std::string complete(const eval::ModelRequest& request) override;

 private:
  Endpoint endpoint_;
  double timeout_;
};

}  // namespace abstain::cli
