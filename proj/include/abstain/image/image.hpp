// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace abstain::image {

/// Axis-aligned box in pixels: top-left corner plus extent.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const BoundingBox&) const = default;
  long long area() const { return static_cast<long long>(width) * height; }
};

bool intersects(const BoundingBox& a, const BoundingBox& b);

/// Interleaved 8-bit pixels, row-major, `channels` samples per pixel.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  BoundingBox bounds() const { return {0, 0, width_, height_}; }

  std::uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<std::uint8_t> pixels() { return data_; }
  std::span<const std::uint8_t> pixels() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// True when the box has positive extent and lies inside the image.
bool within(const Image& image, const BoundingBox& box);

/// Decodes PNG or JPEG, chosen by file signature.
Image read_image(const std::filesystem::path& path);

/// Lossless 8-bit PNG (gray, gray+alpha, RGB or RGBA by channel count).
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace abstain::image
