// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/selective/storage.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "abstain/core/error.hpp"

namespace abstain::selective {
namespace {

using nlohmann::json;

template <typename T, typename U>
void put_le(std::ostream& out, T value) {
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  char bytes[sizeof bits];
  for (std::size_t i = 0; i < sizeof bits; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, sizeof bytes);
}

template <typename T, typename U>
T get_le(const unsigned char* bytes) {
  U bits = 0;
  for (std::size_t i = 0; i < sizeof bits; ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

void save_features(const std::filesystem::path& path, std::span<const FusedFeature> features) {
  const std::size_t dims = features.empty() ? 0 : features.front().x.size();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  json ids = json::array();
  for (const auto& f : features) {
    if (f.x.size() != dims) throw Error("save_features: ragged feature '" + f.id + "'");
    for (double v : f.x) put_le<float, std::uint32_t>(out, static_cast<float>(v));
    ids.push_back(f.id);
  }
  std::ofstream manifest(sidecar(path), std::ios::trunc);
  manifest << json{{"rows", features.size()}, {"dims", dims}, {"dtype", "float32-le"}, {"ids", ids}}
                  .dump(2)
           << '\n';
  if (!out || !manifest) throw Error("write failed for " + path.string());
}

std::vector<FusedFeature> load_features(const std::filesystem::path& path) {
  const json manifest = read_json(sidecar(path));
  const auto rows = manifest.at("rows").get<std::size_t>();
  const auto dims = manifest.at("dims").get<std::size_t>();
  const auto ids = manifest.at("ids").get<std::vector<std::string>>();
  if (manifest.value("dtype", "float32-le") != "float32-le") throw Error("unsupported feature dtype");
  if (ids.size() != rows) throw Error("feature manifest: ids/rows mismatch");
  const auto bytes = read_bytes(path);
  if (bytes.size() != rows * dims * 4) {
    throw Error("feature file " + path.string() + " has " + std::to_string(bytes.size()) +
                " bytes, manifest implies " + std::to_string(rows * dims * 4));
  }
  std::vector<FusedFeature> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r].id = ids[r];
    out[r].x.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      out[r].x[d] = get_le<float, std::uint32_t>(bytes.data() + 4 * (r * dims + d));
    }
  }
  return out;
}

std::map<std::string, std::optional<std::size_t>> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, std::optional<std::size_t>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      std::optional<std::size_t> answer;
      if (!j.at("answer").is_null()) answer = j.at("answer").get<std::size_t>();
      out[j.at("id").get<std::string>()] = answer;
    } catch (const json::exception& e) {
      throw Error(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void save_labels(const std::filesystem::path& path,
                 const std::map<std::string, std::optional<std::size_t>>& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [id, answer] : labels) {
    json j{{"id", id}, {"answer", nullptr}};
    if (answer) j["answer"] = *answer;
    out << j.dump() << '\n';
  }
}

std::vector<TrainingExample> join_labels(
    std::vector<FusedFeature> features,
    const std::map<std::string, std::optional<std::size_t>>& labels) {
  std::vector<TrainingExample> out;
  out.reserve(features.size());
  for (auto& f : features) {
    auto it = labels.find(f.id);
    if (it == labels.end()) throw Error("no label for feature '" + f.id + "'");
    out.push_back({std::move(f), it->second});
  }
  return out;
}

void save_heads(const std::filesystem::path& path, const SelectiveHeads& heads) {
  auto blob = path;
  blob.replace_extension(".bin");
  std::ofstream out(blob, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + blob.string());
  const auto& c = heads.classifier;
  for (double v : c.weight) put_le<double, std::uint64_t>(out, v);
  for (double v : c.bias) put_le<double, std::uint64_t>(out, v);
  if (heads.binary) {
    for (double v : heads.binary->weight) put_le<double, std::uint64_t>(out, v);
    put_le<double, std::uint64_t>(out, heads.binary->bias);
  }
  json meta{{"version", kHeadFormatVersion},
            {"variant", std::string(to_string(heads.variant))},
            {"answers", c.answers},
            {"dims", c.dims},
            {"binary_head", heads.binary.has_value()},
            {"blob", blob.filename().string()},
            {"dtype", "float64-le"},
            {"layout", heads.binary ? json{"classifier.weight", "classifier.bias", "binary.weight",
                                           "binary.bias"}
                                    : json{"classifier.weight", "classifier.bias"}}};
  std::ofstream m(path, std::ios::trunc);
  m << meta.dump(2) << '\n';
  if (!out || !m) throw Error("write failed for " + path.string());
}

SelectiveHeads load_heads(const std::filesystem::path& path) {
  const json meta = read_json(path);
  if (meta.at("version").get<int>() != kHeadFormatVersion) {
    throw Error("unsupported head format version " + meta.at("version").dump());
  }
  SelectiveHeads heads;
  heads.variant = variant_from_string(meta.at("variant").get<std::string>());
  const auto answers = meta.at("answers").get<std::size_t>();
  const auto dims = meta.at("dims").get<std::size_t>();
  const bool binary = meta.at("binary_head").get<bool>();
  const auto bytes = read_bytes(path.parent_path() / meta.at("blob").get<std::string>());
  const std::size_t count = answers * dims + answers + (binary ? dims + 1 : 0);
  if (bytes.size() != count * 8) throw Error("head blob size does not match its manifest");
  std::size_t at = 0;
  auto next = [&] { return get_le<double, std::uint64_t>(bytes.data() + 8 * at++); };
  heads.classifier = ClassifierHead::zeros(answers, dims);
  for (double& v : heads.classifier.weight) v = next();
  for (double& v : heads.classifier.bias) v = next();
  if (binary) {
    heads.binary = BinaryHead::zeros(dims);
    for (double& v : heads.binary->weight) v = next();
    heads.binary->bias = next();
  }
  if (heads.variant == Variant::kCls && !heads.binary) throw Error("CLS heads need a binary head");
  return heads;
}

}  // namespace abstain::selective
