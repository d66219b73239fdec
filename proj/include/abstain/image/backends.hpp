// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "abstain/image/image.hpp"

namespace abstain::image {

/// Unit-normalized image feature vector.
struct ImageEmbedding {
  std::string image_ref;
  std::vector<float> vector;
};

/// Scales `vector` to unit length; throws on a zero vector.
ImageEmbedding make_embedding(std::string image_ref, std::vector<float> vector);

struct DetectedObject {
  std::string label;
  BoundingBox box;
  double score = 0.0;
};

struct ObjectDetection {
  std::string image_ref;
  std::vector<DetectedObject> objects;
};

/// Throws abstain::Error when a box is empty, leaves the image or a score is
/// outside [0, 1].
void validate(const ObjectDetection& detection, int image_width, int image_height);

class ImageEmbedder {
 public:
  virtual ~ImageEmbedder() = default;
  virtual ImageEmbedding embed(std::string_view image_ref) const = 0;
};

class ObjectDetector {
 public:
  virtual ~ObjectDetector() = default;
  virtual ObjectDetection detect(std::string_view image_ref) const = 0;
};

/// Embeddings read from a JSON object {"image_ref": [v1, ..., vd], ...}.
class LookupEmbedder final : public ImageEmbedder {
 public:
  LookupEmbedder() = default;
  static LookupEmbedder from_json_file(const std::filesystem::path& path);

  void add(const std::string& image_ref, std::vector<float> vector);
  ImageEmbedding embed(std::string_view image_ref) const override;
  std::vector<std::string> refs() const;

 private:
  std::map<std::string, ImageEmbedding, std::less<>> table_;
};

/// Detections read from {"image_ref": [{"label": .., "bbox": [x, y, w, h],
/// "score": ..}, ...], ...}. Unknown refs yield an empty detection.
class FixtureDetector final : public ObjectDetector {
 public:
  FixtureDetector() = default;
  static FixtureDetector from_json(const nlohmann::json& j);
  static FixtureDetector from_json_file(const std::filesystem::path& path);

  void add(ObjectDetection detection);
  ObjectDetection detect(std::string_view image_ref) const override;

 private:
  std::map<std::string, ObjectDetection, std::less<>> table_;
};

nlohmann::json to_json(const BoundingBox& box);
BoundingBox box_from_json(const nlohmann::json& j);

}  // namespace abstain::image
