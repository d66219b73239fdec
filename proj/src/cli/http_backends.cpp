// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/cli/http_backends.hpp"

#include <httplib.h>

#include <cmath>

#include "abstain/core/error.hpp"

namespace abstain::cli {
namespace {

using nlohmann::json;

json post_json(const Endpoint& endpoint, double timeout, const json& body) {
  httplib::Client client(endpoint.base);
  const auto sec = static_cast<time_t>(timeout);
  const auto usec = static_cast<time_t>((timeout - std::floor(timeout)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw Error("POST " + endpoint.base + endpoint.path + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error("POST " + endpoint.base + endpoint.path + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error("POST " + endpoint.base + endpoint.path + ": bad JSON reply: " + e.what());
  }
}

}  // namespace

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error("endpoint '" + url + "' lacks a scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

HttpLmScorer::HttpLmScorer(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_(timeout_seconds) {}

double HttpLmScorer::score(std::string_view text) const {
  const auto reply = post_json(endpoint_, timeout_, {{"text", text}});
  return reply.at("nll").get<double>();
}

HttpEmbedder::HttpEmbedder(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_(timeout_seconds) {}

image::ImageEmbedding HttpEmbedder::embed(std::string_view image_ref) const {
  const auto reply = post_json(endpoint_, timeout_, {{"image", image_ref}});
  return image::make_embedding(std::string(image_ref), reply.at("vector").get<std::vector<float>>());
}

HttpDetector::HttpDetector(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_(timeout_seconds) {}

image::ObjectDetection HttpDetector::detect(std::string_view image_ref) const {
  const auto reply = post_json(endpoint_, timeout_, {{"image", image_ref}});
  image::ObjectDetection out{std::string(image_ref), {}};
  for (const auto& o : reply.at("objects")) {
    out.objects.push_back({o.at("label").get<std::string>(), image::box_from_json(o.at("bbox")),
                           o.at("score").get<double>()});
  }
  return out;
}

HttpModelClient::HttpModelClient(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_(timeout_seconds) {}

std::string HttpModelClient::complete(const eval::ModelRequest& request) {
  const auto reply = post_json(endpoint_, timeout_,
                               {{"id", request.id}, {"prompt", request.prompt}, {"image", request.image_ref}});
  return reply.at("text").get<std::string>();
}

}  // namespace abstain::cli
