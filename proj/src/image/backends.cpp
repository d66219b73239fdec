// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/image/backends.hpp"

#include <cmath>
#include <fstream>

#include "abstain/core/error.hpp"

namespace abstain::image {

ImageEmbedding make_embedding(std::string image_ref, std::vector<float> vector) {
  double norm = 0.0;
  for (float x : vector) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error("embedding for '" + image_ref + "' is zero or non-finite");
  }
  for (float& x : vector) x = static_cast<float>(x / norm);
  return {std::move(image_ref), std::move(vector)};
}

void validate(const ObjectDetection& detection, int image_width, int image_height) {
  for (const auto& o : detection.objects) {
    const auto& b = o.box;
    if (b.width <= 0 || b.height <= 0 || b.x < 0 || b.y < 0 || b.x + b.width > image_width ||
        b.y + b.height > image_height) {
      throw Error("detection '" + o.label + "' in " + detection.image_ref +
                  " has a box outside the image");
    }
    if (!(o.score >= 0.0 && o.score <= 1.0)) {
      throw Error("detection '" + o.label + "' in " + detection.image_ref +
                  " has a score outside [0, 1]");
    }
  }
}

LookupEmbedder LookupEmbedder::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings " + path.string());
  const auto j = nlohmann::json::parse(in);
  LookupEmbedder out;
  for (const auto& [ref, v] : j.items()) out.add(ref, v.get<std::vector<float>>());
  return out;
}

void LookupEmbedder::add(const std::string& image_ref, std::vector<float> vector) {
  if (!table_.empty() && table_.begin()->second.vector.size() != vector.size()) {
    throw Error("embedding for '" + image_ref + "' has a different dimension");
  }
  table_.insert_or_assign(image_ref, make_embedding(image_ref, std::move(vector)));
}

ImageEmbedding LookupEmbedder::embed(std::string_view image_ref) const {
  auto it = table_.find(image_ref);
  if (it == table_.end()) throw Error("no embedding for image '" + std::string(image_ref) + "'");
  return it->second;
}

std::vector<std::string> LookupEmbedder::refs() const {
  std::vector<std::string> out;
  for (const auto& [ref, _] : table_) out.push_back(ref);
  return out;
}

nlohmann::json to_json(const BoundingBox& box) {
  return nlohmann::json::array({box.x, box.y, box.width, box.height});
}

BoundingBox box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("bbox must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

FixtureDetector FixtureDetector::from_json(const nlohmann::json& j) {
  FixtureDetector out;
  for (const auto& [ref, objects] : j.items()) {
    ObjectDetection d{ref, {}};
    for (const auto& o : objects) {
      d.objects.push_back({o.at("label").get<std::string>(), box_from_json(o.at("bbox")),
                           o.value("score", 1.0)});
    }
    out.add(std::move(d));
  }
  return out;
}

FixtureDetector FixtureDetector::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open detections " + path.string());
  return from_json(nlohmann::json::parse(in));
}

void FixtureDetector::add(ObjectDetection detection) {
  auto ref = detection.image_ref;
  table_.insert_or_assign(std::move(ref), std::move(detection));
}

ObjectDetection FixtureDetector::detect(std::string_view image_ref) const {
  auto it = table_.find(image_ref);
  if (it == table_.end()) return {std::string(image_ref), {}};
  return it->second;
}

}  // namespace abstain::image
