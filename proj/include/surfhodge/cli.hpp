// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "surfhodge/config.hpp"
#include "surfhodge/error.hpp"

namespace surfhodge {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,      // unreadable or invalid mesh, config or arguments
  kExitAlgorithm = 3,  // failed checks, basis construction, blow-up
  kExitSolver = 4,     // factorization or linear solve failure
};

int exit_code(Errc code);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  KeyValues config;
  std::string mesh;
  std::uint64_t mesh_checksum = 0;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::vector<std::pair<std::string, double>> timings;  // seconds per phase
  std::vector<std::string> outputs;                     // relative to the output directory
};

std::string manifest_json(const RunManifest& manifest);

/// Runs one command. `args` excludes the program name. Never throws; the
/// return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace surfhodge
