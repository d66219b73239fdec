// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace abstain {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// all index draws go through uniform_index to stay reproducible across
// standard libraries.
using Rng = std::mt19937_64;

/// Unbiased draw from [0, n). n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform draw from [0, 1) using the top 53 bits.
double uniform_real(Rng& rng);

/// Standard normal via Box-Muller on uniform_real.
double standard_normal(Rng& rng);

/// Stable per-item seed: FNV-1a of `key` mixed with `base` through splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::string_view key);

template <typename T>
void seeded_shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace abstain
