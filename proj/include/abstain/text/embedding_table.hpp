// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace abstain::text {

/// Word vectors of one fixed dimension. Unknown tokens are a miss
/// (std::nullopt), never a zero vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  /// Plain-text "token v1 ... vd" rows, the GloVe distribution format.
  static EmbeddingTable load_text(const std::filesystem::path& path);

  void add(std::string token, std::vector<float> vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& vocabulary() const { return tokens_; }
  bool contains(std::string_view token) const;
  std::optional<std::span<const float>> find(std::string_view token) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace abstain::text
