// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/core/dataset.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "abstain/core/error.hpp"
#include "abstain/core/lexical.hpp"
#include "abstain/core/random.hpp"

namespace abstain {
namespace {

template <typename T, typename Parse>
std::vector<T> load_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<T> out;
  std::vector<std::string> diagnostics;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return out;
}

}  // namespace

void write_lines_locked(const std::filesystem::path& path, std::span<const std::string> lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT, 0644);
  if (fd < 0) throw Error("cannot write " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw Error("cannot lock " + path.string());
  }
  // Truncate only once the lock is held.
  if (::ftruncate(fd, 0) != 0) {
    ::close(fd);
    throw Error("cannot truncate " + path.string());
  }
  std::string buffer;
  for (const auto& l : lines) {
    buffer += l;
    buffer += '\n';
  }
  std::size_t written = 0;
  while (written < buffer.size()) {
    const auto n = ::write(fd, buffer.data() + written, buffer.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error("write failed for " + path.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

std::vector<VqaInstance> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<VqaInstance> out;
  std::vector<std::string> diagnostics;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    try {
      auto instance = instance_from_json(nlohmann::json::parse(line));
      auto [it, inserted] = first_line.emplace(instance.id, line_no);
      if (!inserted) {
        diagnostics.push_back(where + "duplicate id '" + instance.id + "' (first seen on line " +
                              std::to_string(it->second) + ")");
        continue;
      }
      out.push_back(std::move(instance));
    } catch (const nlohmann::json::exception& e) {
      diagnostics.push_back(where + e.what());
    } catch (const Error& e) {
      diagnostics.push_back(where + e.what());
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return out;
}

void save_dataset(std::span<const VqaInstance> instances, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(instances.size());
  for (const auto& i : instances) lines.push_back(to_json(i).dump());
  write_lines_locked(path, lines);
}

std::vector<PerturbationRecord> load_records(const std::filesystem::path& path) {
  return load_jsonl<PerturbationRecord>(path, record_from_json);
}

void save_records(std::span<const PerturbationRecord> records, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    validate(r);
    lines.push_back(to_json(r).dump());
  }
  write_lines_locked(path, lines);
}

std::vector<VqaInstance> filter_binary_answers(std::span<const VqaInstance> instances) {
  std::vector<VqaInstance> out;
  for (const auto& instance : instances) {
    if (instance.answer_type == AnswerType::kYesNo) continue;
    bool binary = false;
    for (const auto& a : instance.answers) {
      const auto n = normalize_answer(a);
      if (n == "yes" || n == "no") {
        binary = true;
        break;
      }
    }
    if (!binary) out.push_back(instance);
  }
  return out;
}

namespace {

struct SplitSizes {
  std::size_t train, valid, test;
};

SplitSizes sizes_for(std::size_t n, const SplitRatios& ratios) {
  // The epsilon absorbs representation error such as 0.1 * 30 = 3.0000000000000004
  // or 0.7 * 100 = 69.99999999999999, without ever rounding a true fraction up.
  auto take = [n](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
  };
  const std::size_t valid = take(ratios[1]);
  const std::size_t test = take(ratios[2]);
  return {n - valid - test, valid, test};
}

}  // namespace

DatasetSplit split_dataset(std::span<const VqaInstance> instances, SplitRatios ratios,
                           std::uint64_t seed,
                           const std::function<std::string(const VqaInstance&)>& group_of) {
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error("split ratios must be positive");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw Error("split ratios must sum to 1");
  }

  // Groups are visited in key order so the result depends only on the seed.
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& i : instances) groups[group_of ? group_of(i) : std::string()].push_back(i.id);

  DatasetSplit out;
  out.seed = seed;
  Rng rng(seed);
  for (auto& [key, ids] : groups) {
    seeded_shuffle(std::span<std::string>(ids), rng);
    const auto sizes = sizes_for(ids.size(), ratios);
    auto it = ids.begin();
    out.train_ids.insert(out.train_ids.end(), it, it + static_cast<std::ptrdiff_t>(sizes.train));
    it += static_cast<std::ptrdiff_t>(sizes.train);
    out.valid_ids.insert(out.valid_ids.end(), it, it + static_cast<std::ptrdiff_t>(sizes.valid));
    it += static_cast<std::ptrdiff_t>(sizes.valid);
    out.test_ids.insert(out.test_ids.end(), it, ids.end());
  }
  return out;
}

std::vector<VqaInstance> apply_split(std::span<const VqaInstance> instances,
                                     const DatasetSplit& split) {
  std::unordered_map<std::string, Split> assignment;
  for (const auto& id : split.train_ids) assignment[id] = Split::kTrain;
  for (const auto& id : split.valid_ids) assignment[id] = Split::kValid;
  for (const auto& id : split.test_ids) assignment[id] = Split::kTest;
  std::vector<VqaInstance> out(instances.begin(), instances.end());
  for (auto& i : out) {
    auto it = assignment.find(i.id);
    i.split = it == assignment.end() ? Split::kUnassigned : it->second;
  }
  return out;
}

}  // namespace abstain
