// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "abstain/eval/harness.hpp"

namespace abstain::eval {

/// Percentage with one decimal, e.g. 0.409 -> "40.9".
std::string percent(double ratio);

/// One row per (client, shot composition), one Acc/OoS column pair per
/// protocol (BY, MC, OE, OEH). BY reports Acc_b, the others Acc_o; missing
/// cells print "-".
std::string render_table(std::span<const MetricReport> reports);

/// Per answer-type breakdown of a single report (Y/N, Num., Other, All).
std::string render_breakdown(const MetricReport& report);

}  // namespace abstain::eval
