// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/eval/report.hpp"

#include <cstdio>
#include <map>
#include <tuple>
#include <vector>

namespace abstain::eval {
namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

double headline(const MetricBlock& m, Protocol protocol) {
  return protocol == Protocol::kBY ? m.acc_b : m.acc_o.value_or(0.0);
}

}  // namespace

std::string percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ratio * 100.0);
  return buf;
}

std::string render_table(std::span<const MetricReport> reports) {
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, std::map<Protocol, const MetricReport*>> rows;
  for (const auto& r : reports) {
    rows[{r.client, r.shots.n_answerable, r.shots.n_unanswerable}][r.protocol] = &r;
  }
  const Protocol protocols[] = {Protocol::kBY, Protocol::kMC, Protocol::kOE, Protocol::kOEH};
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Model", "#Shots", "#Ans", "#Una"};
  for (auto p : protocols) {
    header.push_back(std::string(to_string(p)) + " Acc");
    header.push_back(std::string(to_string(p)) + " OoS");
  }
  cells.push_back(header);
  for (const auto& [key, by_protocol] : rows) {
    const auto& [client, ans, una] = key;
    std::vector<std::string> row{client, std::to_string(ans + una), std::to_string(ans),
                                 std::to_string(una)};
    for (auto p : protocols) {
      auto it = by_protocol.find(p);
      if (it == by_protocol.end()) {
        row.insert(row.end(), {"-", "-"});
      } else {
        const auto& m = it->second->all();
        row.push_back(percent(headline(m, p)));
        row.push_back(percent(m.oos_ratio));
      }
    }
    cells.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) out += " | ";
      out += c == 0 ? pad_right(cells[r][c], width[c]) : pad(cells[r][c], width[c]);
    }
    out += '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) {
        if (c) out += "-+-";
        out += std::string(width[c], '-');
      }
      out += '\n';
    }
  }
  return out;
}

std::string render_breakdown(const MetricReport& report) {
  const std::pair<const char*, const char*> columns[] = {
      {"yes-no", "Y/N"}, {"number", "Num."}, {"other", "Other"}, {"all", "All"}};
  std::string out = std::string(to_string(report.protocol)) + " " + report.client + " (" +
                    std::to_string(report.shots.n_answerable) + "/" +
                    std::to_string(report.shots.n_unanswerable) + " shots)\n";
  out += pad_right("metric", 8);
  for (const auto& [_, label] : columns) out += " | " + pad(label, 6);
  out += '\n';
  auto line = [&](const char* name, auto get) {
    out += pad_right(name, 8);
    for (const auto& [type, _] : columns) {
      auto it = report.breakdown.find(type);
      out += " | " + pad(it == report.breakdown.end() || it->second.n == 0 ? "-" : get(it->second), 6);
    }
    out += '\n';
  };
  line("n", [](const MetricBlock& m) { return std::to_string(m.n); });
  line("Acc_b", [](const MetricBlock& m) { return percent(m.acc_b); });
  if (report.protocol != Protocol::kBY) {
    line("Acc_o", [](const MetricBlock& m) { return percent(m.acc_o.value_or(0.0)); });
  }
  line("F1_w", [](const MetricBlock& m) { return percent(m.f1_weighted); });
  line("OoS", [](const MetricBlock& m) { return percent(m.oos_ratio); });
  return out;
}

}  // namespace abstain::eval
