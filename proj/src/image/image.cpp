// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/image/image.hpp"

#include "abstain/core/error.hpp"

namespace abstain::image {

bool intersects(const BoundingBox& a, const BoundingBox& b) {
  return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height &&
         b.y < a.y + a.height;
}

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || channels < 1 || channels > 4) {
    throw Error("invalid image shape " + std::to_string(width) + "x" + std::to_string(height) +
                "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

bool within(const Image& image, const BoundingBox& box) {
  return box.width > 0 && box.height > 0 && box.x >= 0 && box.y >= 0 &&
         box.x + box.width <= image.width() && box.y + box.height <= image.height();
}

}  // namespace abstain::image
