// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abstain/core/types.hpp"

namespace abstain {

/// Reads one VqaInstance per line. All malformed lines are collected and
/// reported together through ValidationError ("line N: ...").
std::vector<VqaInstance> load_dataset(const std::filesystem::path& path);

/// Writes one compact JSON object per line, keys sorted. Holds an exclusive
/// advisory lock on the output path while writing.
void save_dataset(std::span<const VqaInstance> instances, const std::filesystem::path& path);

std::vector<PerturbationRecord> load_records(const std::filesystem::path& path);
void save_records(std::span<const PerturbationRecord> records, const std::filesystem::path& path);

/// Drops every instance typed yes/no or carrying a "yes"/"no" answer.
std::vector<VqaInstance> filter_binary_answers(std::span<const VqaInstance> instances);

using SplitRatios = std::array<double, 3>;  // train, valid, test

/// Seeded shuffle, then valid/test take floor(ratio * N) and train takes the
/// rest. With `group_of`, the same rule is applied within each group,
/// which stratifies the split by that key.
DatasetSplit split_dataset(std::span<const VqaInstance> instances, SplitRatios ratios,
                           std::uint64_t seed,
                           const std::function<std::string(const VqaInstance&)>& group_of = {});

/// Returns copies of `instances` with the split field set from `split`.
std::vector<VqaInstance> apply_split(std::span<const VqaInstance> instances,
                                     const DatasetSplit& split);

/// Writes `lines` to `path` under an exclusive flock. Shared by all JSONL writers.
void write_lines_locked(const std::filesystem::path& path, std::span<const std::string> lines);

}  // namespace abstain
