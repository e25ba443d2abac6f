// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tiershard {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input: files, manifests, topologies.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented invariant was violated by otherwise well-formed input
/// (e.g. an infeasible memory budget, a plan/manifest mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tiershard
