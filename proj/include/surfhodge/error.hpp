// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfhodge {

enum class Errc {
  ParseError,
  NonManifold,
  NonOrientable,
  NonTriangle,
  DegenerateTriangle,
  IndexOutOfRange,
  DisconnectedMesh,
  UnsupportedCombination,
  DegreeMismatch,
  DimensionMismatch,
  NonpositiveParameter,
  NotDivergenceFree,
  SingularMatrix,
  NotSPD,
  SolverFailure,
  SingularSchur,
  SingularOperator,
  MaxAttemptsExceeded,
  BasisMismatch,
  WrongDegree,
  NaNDetected,
  IoError,
  ConfigError,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; the code distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace surfhodge
