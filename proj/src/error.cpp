// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/error.hpp"

namespace surfhodge {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::NonManifold: return "NonManifold";
    case Errc::NonOrientable: return "NonOrientable";
    case Errc::NonTriangle: return "NonTriangle";
    case Errc::DegenerateTriangle: return "DegenerateTriangle";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DisconnectedMesh: return "DisconnectedMesh";
    case Errc::UnsupportedCombination: return "UnsupportedCombination";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonpositiveParameter: return "NonpositiveParameter";
    case Errc::NotDivergenceFree: return "NotDivergenceFree";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NotSPD: return "NotSPD";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::SingularSchur: return "SingularSchur";
    case Errc::SingularOperator: return "SingularOperator";
    case Errc::MaxAttemptsExceeded: return "MaxAttemptsExceeded";
    case Errc::BasisMismatch: return "BasisMismatch";
    case Errc::WrongDegree: return "WrongDegree";
    case Errc::NaNDetected: return "NaNDetected";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace surfhodge
