// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "abstain/image/image.hpp"

namespace abstain::image {

/// Zeroes every channel inside `box`; everything else is copied unchanged.
/// Throws abstain::Error when the box leaves the image.
Image mask_object(const Image& image, const BoundingBox& box);

/// Bilinear resampling of `region` of `image` to width x height, with
/// half-pixel centres (an equal-size resample is an exact copy).
Image resize_bilinear(const Image& image, const BoundingBox& region, int width, int height);

/// Source windows are tried at these fractions of the target size.
inline constexpr std::array<double, 3> kCopyMoveScales = {1.0, 0.75, 0.5};

struct CopyMoveResult {
  Image image;
  BoundingBox source;
};

/// Refills `target` with a patch taken from elsewhere in the image and
/// rescaled to the target size. The patch is drawn uniformly (seeded) from
/// all windows at kCopyMoveScales that fit inside the image and are disjoint
/// from `target` and from every box in `avoid`. Throws SkipError when no
/// such window exists.
CopyMoveResult copy_move_object(const Image& image, const BoundingBox& target,
                                std::span<const BoundingBox> avoid, std::uint64_t seed);

}  // namespace abstain::image
