// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abstain::csv {

// RFC 4180: comma separated, CRLF or LF line ends, fields quoted when they
// contain a comma, quote or newline.

std::string format_row(std::span<const std::string> fields);

/// Throws abstain::Error on an unterminated quoted field.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace abstain::csv
