// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abstain/selective/training.hpp"

namespace abstain::selective {

/// Feature matrix: `path` holds little-endian float32 values, row-major,
/// and `path` + ".json" the manifest {"rows", "dims", "ids", "dtype"}.
void save_features(const std::filesystem::path& path, std::span<const FusedFeature> features);
std::vector<FusedFeature> load_features(const std::filesystem::path& path);

/// Labels as JSON lines {"id": ..., "answer": <int> | null}; null = unanswerable.
std::map<std::string, std::optional<std::size_t>> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path,
                 const std::map<std::string, std::optional<std::size_t>>& labels);

/// Joins features with labels by id; a feature without a label throws.
std::vector<TrainingExample> join_labels(
    std::vector<FusedFeature> features,
    const std::map<std::string, std::optional<std::size_t>>& labels);

/// Heads as `path` (versioned JSON) plus a float64 little-endian blob next
/// to it, named in the JSON.
void save_heads(const std::filesystem::path& path, const SelectiveHeads& heads);
SelectiveHeads load_heads(const std::filesystem::path& path);

inline constexpr int kHeadFormatVersion = 1;

}  // namespace abstain::selective
