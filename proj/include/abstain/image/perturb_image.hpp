// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "abstain/core/types.hpp"
#include "abstain/image/backends.hpp"
#include "abstain/image/replacement.hpp"
#include "abstain/text/perturb_text.hpp"

namespace abstain::image {

struct ImagePerturbConfig {
  double alpha = kDefaultAlpha;
  std::size_t top_n = kDefaultTopN;
  double min_score = kDefaultMinDetectionScore;
  std::size_t max_objects = 1;  // I-2 and I-3 records per instance, each
  std::uint64_t seed = 0;
  bool replace = true;
  bool mask = true;
  bool copy_move = true;
};

/// Resolves image refs for reading and stores perturbed images.
class ImageStore {
 public:
  virtual ~ImageStore() = default;
  virtual Image load(std::string_view image_ref) const = 0;
  /// Persists `image` under `name` and returns the ref recorded for it.
  virtual std::string save(const Image& image, std::string_view name) = 0;
};

/// Reads refs relative to `input_root`; writes PNGs to
/// `output_root/images/<name>.png` and returns "images/<name>.png".
class FileImageStore final : public ImageStore {
 public:
  FileImageStore(std::filesystem::path input_root, std::filesystem::path output_root);
  Image load(std::string_view image_ref) const override;
  std::string save(const Image& image, std::string_view name) override;

 private:
  std::filesystem::path input_root_;
  std::filesystem::path output_root_;
};

struct ImageBackends {
  const ImageEmbedder& embedder;
  const ObjectDetector& detector;
  const text::PosTagger& tagger;
  ImageStore& store;
  std::span<const ImageEmbedding> pool;  // candidate images for replacement
};

/// One I-1 record when a replacement is selectable, and up to
/// `max_objects` I-2 and I-3 records for objects the question or answers
/// refer to.
PerturbOutcome perturb_image(const VqaInstance& instance, const ImagePerturbConfig& config,
                             const ImageBackends& backends);

}  // namespace abstain::image
