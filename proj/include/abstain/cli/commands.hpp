// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abstain::cli {

/// Exit codes: 0 success, 1 usage error, 2 fatal error (a JSON object
/// {"error": ...} is written to `err`).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFatal = 2;

/// Entry point shared by the `abstain` binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abstain::cli
