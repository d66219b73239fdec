// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "abstain/cli/commands.hpp"

int main(int argc, char** argv) {
  return abstain::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
