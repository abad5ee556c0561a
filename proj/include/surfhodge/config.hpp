// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "surfhodge/expression.hpp"
#include "surfhodge/flow.hpp"

namespace surfhodge {

/// Flat `key = value` file. `#` starts a comment, blank lines are ignored,
/// repeated keys are an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");
KeyValues read_key_values(const std::filesystem::path& path);

enum class ForcingKind { None, ConstantBand, RigidRotationProjected, Expression };
enum class InitialKind { Stokes, Zero };

std::string_view to_string(ForcingKind kind);
std::string_view to_string(InitialKind kind);
std::string_view to_string(WallCondition wall);

struct ForcingConfig {
  ForcingKind kind = ForcingKind::None;
  double amplitude = 1.0;
  // constant-band: amplitude * direction where lower <= x[axis] < upper
  int axis = 0;
  double lower = -1e300;
  double upper = 1e300;
  Vec3 direction = Vec3::UnitY();
  // rigid-rotation-projected: amplitude * (x - center) / |x - center| x rotation_axis
  Vec3 center = Vec3::Zero();
  Vec3 rotation_axis = Vec3::UnitZ();
  // expression: components over (x, y, z, t)
  std::string fx = "0", fy = "0", fz = "0";
  // the forcing vanishes for t > t_off
  double t_off = 1e300;
};

/// Everything a command reads from a config file.
struct RunConfig {
  std::filesystem::path mesh;
  FlowConfig flow;
  ForcingConfig forcing;
  InitialKind initial = InitialKind::Stokes;
  double tol = 1e-8;  // harmonic basis drop tolerance
  std::filesystem::path basis;  // optional precomputed harmonic basis
  std::string prefix = "flow";
  bool compare_saddle = false;
};

/// Typed view of the key-value pairs. Unknown keys and malformed values throw
/// ConfigError. Relative mesh and basis paths are resolved against base_dir.
RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// All keys with their effective values, in the file syntax.
KeyValues to_key_values(const RunConfig& config);
void write_run_config(std::ostream& out, const RunConfig& config);

/// Keys accepted by parse_run_config, with a one-line description each.
const std::vector<std::pair<std::string, std::string>>& config_schema();

/// Tangential forcing as a function of position and time.
class Forcing {
 public:
  explicit Forcing(const ForcingConfig& config);

  Vec3 operator()(const Vec3& x, double t) const;
  bool is_zero() const { return config_.kind == ForcingKind::None; }
  bool time_dependent() const;

 private:
  ForcingConfig config_;
  Expression fx_, fy_, fz_;
};

/// Load vector of the forcing on V at time t; cached when time independent.
ForcingLoad make_forcing_load(const FeSpace& V, const ForcingConfig& config);

}  // namespace surfhodge
