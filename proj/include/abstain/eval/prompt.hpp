// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/annotation/types.hpp"

namespace abstain::eval {

enum class Protocol { kBY, kMC, kOE, kOEH };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view text);

using McOptions = std::array<std::string, 4>;

/// Fills one of the four probe templates. `options` must be given iff the
/// protocol is MC and `hint` iff it is OEH; throws abstain::Error otherwise.
std::string build_prompt(std::string_view question, Protocol protocol,
                         const std::optional<McOptions>& options = std::nullopt,
                         std::optional<annotation::Reason> hint = std::nullopt);

/// A worked example: the exemplar's own prompt plus its gold response.
struct ShotExemplar {
  std::string id;
  std::string prompt;
  std::string gold;
  bool answerable = true;
};

struct ShotConfig {
  int n_answerable = 0;
  int n_unanswerable = 0;
  std::uint64_t seed = 0;

  int total() const { return n_answerable + n_unanswerable; }
};

struct FewShotPrompt {
  std::string text;
  std::vector<std::string> exemplar_ids;  // in presentation order
  int n_answerable = 0;
  int n_unanswerable = 0;
};

/// Draws exactly n_answerable + n_unanswerable exemplars (never `query_id`),
/// shuffles their order and places them before the prompt. Each exemplar
/// reads "<prompt>\nAnswer: <gold>"; blocks are separated by a blank line.
/// k = 0 returns the prompt unchanged. Throws abstain::Error when the pool
/// cannot supply the requested composition.
FewShotPrompt assemble_few_shot(std::string_view prompt, const ShotConfig& shots,
                                std::span<const ShotExemplar> pool,
                                std::string_view query_id = {});

}  // namespace abstain::eval
