// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace abstain {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by per-instance pipeline steps when an instance cannot be perturbed.
/// Orchestrators catch it and record the reason in the skip report.
class SkipError : public Error {
 public:
  using Error::Error;
};

/// Carries one diagnostic per offending input line or row.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> diagnostics);

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace abstain
