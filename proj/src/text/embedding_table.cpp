// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/text/embedding_table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "abstain/core/error.hpp"

namespace abstain::text {

EmbeddingTable EmbeddingTable::load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding table " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    std::vector<float> v;
    float x = 0;
    while (row >> x) v.push_back(x);
    if (!row.eof()) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": non-numeric vector entry");
    }
    try {
      table.add(std::move(token), std::move(v));
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void EmbeddingTable::add(std::string token, std::vector<float> vector) {
  if (vector.empty()) throw Error("empty vector for token '" + token + "'");
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw Error("token '" + token + "' has dimension " + std::to_string(vector.size()) +
                ", expected " + std::to_string(dim_));
  }
  if (index_.contains(token)) throw Error("duplicate token '" + token + "'");
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(data_.data() + it->second * dim_, dim_);
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw Error("cosine_similarity: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace abstain::text
