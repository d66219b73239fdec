// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/image/object_edit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"

namespace abstain::image {
namespace {

std::string describe(const BoundingBox& b) {
  return "[" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " + std::to_string(b.width) +
         ", " + std::to_string(b.height) + "]";
}

struct WindowSize {
  int width, height;
};

}  // namespace

Image mask_object(const Image& image, const BoundingBox& box) {
  if (!within(image, box)) throw Error("mask box " + describe(box) + " is outside the image");
  Image out = image;
  for (int y = box.y; y < box.y + box.height; ++y) {
    for (int x = box.x; x < box.x + box.width; ++x) {
      for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = 0;
    }
  }
  return out;
}

Image resize_bilinear(const Image& image, const BoundingBox& region, int width, int height) {
  if (!within(image, region)) throw Error("resize region " + describe(region) + " is outside the image");
  Image out(width, height, image.channels());
  const double sx = static_cast<double>(region.width) / width;
  const double sy = static_cast<double>(region.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, region.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, region.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, region.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, region.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = (1 - wx) * image.at(region.x + x0, region.y + y0, c) +
                           wx * image.at(region.x + x1, region.y + y0, c);
        const double bottom = (1 - wx) * image.at(region.x + x0, region.y + y1, c) +
                              wx * image.at(region.x + x1, region.y + y1, c);
        const double v = (1 - wy) * top + wy * bottom;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

CopyMoveResult copy_move_object(const Image& image, const BoundingBox& target,
                                std::span<const BoundingBox> avoid, std::uint64_t seed) {
  if (!within(image, target)) throw Error("copy-move target " + describe(target) + " is outside the image");

  std::vector<WindowSize> sizes;
  for (double s : kCopyMoveScales) {
    const WindowSize w{std::max(1, static_cast<int>(std::lround(target.width * s))),
                       std::max(1, static_cast<int>(std::lround(target.height * s)))};
    const bool seen = std::any_of(sizes.begin(), sizes.end(), [&](const WindowSize& o) {
      return o.width == w.width && o.height == w.height;
    });
    if (!seen) sizes.push_back(w);
  }

  auto admissible = [&](const BoundingBox& window) {
    if (intersects(window, target)) return false;
    return std::none_of(avoid.begin(), avoid.end(),
                        [&](const BoundingBox& b) { return intersects(window, b); });
  };

  // Two passes over the same enumeration order: count, then locate the k-th.
  auto for_each_window = [&](auto&& visit) {
    for (const auto& size : sizes) {
      for (int y = 0; y + size.height <= image.height(); ++y) {
        for (int x = 0; x + size.width <= image.width(); ++x) {
          const BoundingBox w{x, y, size.width, size.height};
          if (admissible(w) && !visit(w)) return;
        }
      }
    }
  };

  std::uint64_t count = 0;
  for_each_window([&](const BoundingBox&) {
    ++count;
    return true;
  });
  if (count == 0) throw SkipError("no admissible copy-move source region");

  Rng rng(seed);
  std::uint64_t pick = uniform_index(rng, count);
  BoundingBox source;
  for_each_window([&](const BoundingBox& w) {
    if (pick-- == 0) {
      source = w;
      return false;
    }
    return true;
  });

  const Image patch = resize_bilinear(image, source, target.width, target.height);
  Image out = image;
  for (int y = 0; y < target.height; ++y) {
    for (int x = 0; x < target.width; ++x) {
      for (int c = 0; c < out.channels(); ++c) out.at(target.x + x, target.y + y, c) = patch.at(x, y, c);
    }
  }
  return {std::move(out), source};
}

}  // namespace abstain::image
