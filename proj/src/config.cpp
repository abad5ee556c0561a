// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/config.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "surfhodge/assembly.hpp"
#include "surfhodge/error.hpp"

namespace surfhodge {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw Error(Errc::ConfigError, "key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
  Vec3 out;
  std::stringstream ss(v);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i == 3) bad_value(key, v, "three comma separated numbers");
    out[i++] = to_double(key, trim(part));
  }
  if (i != 3) bad_value(key, v, "three comma separated numbers");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + "," + fmt(v.y()) + "," + fmt(v.z()); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(Errc::ConfigError, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(Errc::ConfigError, where + ": empty key");
    if (!kv.emplace(key, value).second) throw Error(Errc::ConfigError, where + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  return parse_key_values(in, path.string());
}

std::string_view to_string(ForcingKind kind) {
  switch (kind) {
    case ForcingKind::None: return "none";
    case ForcingKind::ConstantBand: return "constant-band";
    case ForcingKind::RigidRotationProjected: return "rigid-rotation-projected";
    case ForcingKind::Expression: return "expression";
  }
  return "?";
}

std::string_view to_string(InitialKind kind) { return kind == InitialKind::Stokes ? "stokes" : "zero"; }

std::string_view to_string(WallCondition wall) { return wall == WallCondition::NoSlip ? "no-slip" : "free-slip"; }

const std::vector<std::pair<std::string, std::string>>& config_schema() {
  static const std::vector<std::pair<std::string, std::string>> schema{
      {"mesh", "path to an OFF or OBJ surface, relative to the config file"},
      {"k", "velocity degree (BDM k), integer >= 0"},
      {"mu", "kinematic viscosity, >= 0"},
      {"alpha", "interior penalty; 0 selects 4 (k+1)^2"},
      {"dt", "time step, > 0"},
      {"t_end", "end time"},
      {"wall", "no-slip | free-slip"},
      {"allow_inviscid", "permit mu = 0"},
      {"output_every", "VTK snapshot interval in steps"},
      {"seed", "seed of the harmonic basis sampling and random fields"},
      {"kernel_tol", "relative eigenvalue threshold of the kernel fallback"},
      {"dense_limit", "largest reduced size for the dense kernel fallback"},
      {"cfl", "CFL factor of the time step warning"},
      {"tol", "drop tolerance of the harmonic basis"},
      {"basis", "precomputed harmonic basis file (optional)"},
      {"prefix", "file name prefix of the outputs"},
      {"compare_saddle", "also solve the velocity-pressure system and report the difference"},
      {"initial", "stokes | zero"},
      {"forcing", "none | constant-band | rigid-rotation-projected | expression"},
      {"forcing.amplitude", "scale of the preset forcings"},
      {"forcing.axis", "constant-band: coordinate x | y | z"},
      {"forcing.lower", "constant-band: lower bound of the band"},
      {"forcing.upper", "constant-band: upper bound of the band"},
      {"forcing.direction", "constant-band: force direction a,b,c"},
      {"forcing.center", "rigid-rotation-projected: center a,b,c"},
      {"forcing.rotation_axis", "rigid-rotation-projected: axis a,b,c"},
      {"forcing.fx", "expression: x component over x, y, z, t"},
      {"forcing.fy", "expression: y component"},
      {"forcing.fz", "expression: z component"},
      {"forcing.t_off", "forcing is zero for t > t_off"},
  };
  return schema;
}

RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir) {
  RunConfig c;
  FlowConfig& f = c.flow;
  ForcingConfig& g = c.forcing;
  for (const auto& [key, v] : kv) {
    if (key == "mesh") c.mesh = resolve(base_dir, v);
    else if (key == "k") f.k = static_cast<int>(to_long(key, v));
    else if (key == "mu") f.mu = to_double(key, v);
    else if (key == "alpha") f.alpha = to_double(key, v);
    else if (key == "dt") f.dt = to_double(key, v);
    else if (key == "t_end") f.t_end = to_double(key, v);
    else if (key == "wall") {
      if (v == "no-slip") f.wall = WallCondition::NoSlip;
      else if (v == "free-slip") f.wall = WallCondition::FreeSlip;
      else bad_value(key, v, "no-slip or free-slip");
    } else if (key == "allow_inviscid") f.allow_inviscid = to_bool(key, v);
    else if (key == "output_every") f.output_every = static_cast<int>(to_long(key, v));
    else if (key == "seed") {
      const long s = to_long(key, v);
      if (s < 0) bad_value(key, v, "a nonnegative integer");
      f.seed = static_cast<std::uint64_t>(s);
    } else if (key == "kernel_tol") f.kernel_tol = to_double(key, v);
    else if (key == "dense_limit") f.dense_limit = static_cast<int>(to_long(key, v));
    else if (key == "cfl") f.cfl = to_double(key, v);
    else if (key == "tol") c.tol = to_double(key, v);
    else if (key == "basis") c.basis = v.empty() ? std::filesystem::path{} : resolve(base_dir, v);
    else if (key == "prefix") c.prefix = v;
    else if (key == "compare_saddle") c.compare_saddle = to_bool(key, v);
    else if (key == "initial") {
      if (v == "stokes") c.initial = InitialKind::Stokes;
      else if (v == "zero") c.initial = InitialKind::Zero;
      else bad_value(key, v, "stokes or zero");
    } else if (key == "forcing") {
      if (v == "none") g.kind = ForcingKind::None;
      else if (v == "constant-band") g.kind = ForcingKind::ConstantBand;
      else if (v == "rigid-rotation-projected") g.kind = ForcingKind::RigidRotationProjected;
      else if (v == "expression") g.kind = ForcingKind::Expression;
      else bad_value(key, v, "none, constant-band, rigid-rotation-projected or expression");
    } else if (key == "forcing.amplitude") g.amplitude = to_double(key, v);
    else if (key == "forcing.axis") {
      if (v == "x") g.axis = 0;
      else if (v == "y") g.axis = 1;
      else if (v == "z") g.axis = 2;
      else bad_value(key, v, "x, y or z");
    } else if (key == "forcing.lower") g.lower = to_double(key, v);
    else if (key == "forcing.upper") g.upper = to_double(key, v);
    else if (key == "forcing.direction") g.direction = to_vec3(key, v);
    else if (key == "forcing.center") g.center = to_vec3(key, v);
    else if (key == "forcing.rotation_axis") g.rotation_axis = to_vec3(key, v);
    else if (key == "forcing.fx") g.fx = v;
    else if (key == "forcing.fy") g.fy = v;
    else if (key == "forcing.fz") g.fz = v;
    else if (key == "forcing.t_off") g.t_off = to_double(key, v);
    else throw Error(Errc::ConfigError, "unknown key '" + key + "'");
  }
  if (!(c.tol > 0)) throw Error(Errc::NonpositiveParameter, "tol must be positive");
  validate(f);
  Forcing check(g);  // parses the expressions
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_key_values(path), path.parent_path());
}

KeyValues to_key_values(const RunConfig& c) {
  const FlowConfig& f = c.flow;
  const ForcingConfig& g = c.forcing;
  KeyValues kv;
  kv["mesh"] = c.mesh.string();
  kv["k"] = std::to_string(f.k);
  kv["mu"] = fmt(f.mu);
  kv["alpha"] = fmt(f.alpha);
  kv["dt"] = fmt(f.dt);
  kv["t_end"] = fmt(f.t_end);
  kv["wall"] = std::string(to_string(f.wall));
  kv["allow_inviscid"] = f.allow_inviscid ? "true" : "false";
  kv["output_every"] = std::to_string(f.output_every);
  kv["seed"] = std::to_string(f.seed);
  kv["kernel_tol"] = fmt(f.kernel_tol);
  kv["dense_limit"] = std::to_string(f.dense_limit);
  kv["cfl"] = fmt(f.cfl);
  kv["tol"] = fmt(c.tol);
  kv["basis"] = c.basis.string();
  kv["prefix"] = c.prefix;
  kv["compare_saddle"] = c.compare_saddle ? "true" : "false";
  kv["initial"] = std::string(to_string(c.initial));
  kv["forcing"] = std::string(to_string(g.kind));
  kv["forcing.amplitude"] = fmt(g.amplitude);
  kv["forcing.axis"] = std::string(1, "xyz"[g.axis]);
  kv["forcing.lower"] = fmt(g.lower);
  kv["forcing.upper"] = fmt(g.upper);
  kv["forcing.direction"] = fmt(g.direction);
  kv["forcing.center"] = fmt(g.center);
  kv["forcing.rotation_axis"] = fmt(g.rotation_axis);
  kv["forcing.fx"] = g.fx;
  kv["forcing.fy"] = g.fy;
  kv["forcing.fz"] = g.fz;
  kv["forcing.t_off"] = fmt(g.t_off);
  return kv;
}

void write_run_config(std::ostream& out, const RunConfig& config) {
  for (const auto& [key, value] : to_key_values(config)) out << key << " = " << value << '\n';
}

Forcing::Forcing(const ForcingConfig& config) : config_(config) {
  if (config.kind == ForcingKind::Expression) {
    fx_ = Expression::parse(config.fx);
    fy_ = Expression::parse(config.fy);
    fz_ = Expression::parse(config.fz);
  }
  if (config.kind == ForcingKind::ConstantBand && (config.axis < 0 || config.axis > 2))
    throw Error(Errc::ConfigError, "band axis out of range");
}

bool Forcing::time_dependent() const {
  return config_.kind == ForcingKind::Expression && (fx_.uses_time() || fy_.uses_time() || fz_.uses_time());
}

Vec3 Forcing::operator()(const Vec3& x, double t) const {
  if (t > config_.t_off) return Vec3::Zero();
  switch (config_.kind) {
    case ForcingKind::None: return Vec3::Zero();
    case ForcingKind::ConstantBand: {
      const double s = x[config_.axis];
      if (s < config_.lower || s >= config_.upper) return Vec3::Zero();
      return config_.amplitude * config_.direction;
    }
    case ForcingKind::RigidRotationProjected: {
      const Vec3 r = x - config_.center;
      const double n = r.norm();
      if (n == 0.0) return Vec3::Zero();
      return config_.amplitude * (r / n).cross(config_.rotation_axis);
    }
    case ForcingKind::Expression: return {fx_(x, t), fy_(x, t), fz_(x, t)};
  }
  return Vec3::Zero();
}

ForcingLoad make_forcing_load(const FeSpace& V, const ForcingConfig& config) {
  auto forcing = std::make_shared<Forcing>(config);
  const int n = V.num_dofs();
  if (forcing->is_zero()) return [n](double) { return Eigen::VectorXd::Zero(n).eval(); };
  if (forcing->time_dependent()) {
    return [forcing, &V](double t) {
      return assemble_load(V, VectorFunction([&](int, const Vec3& x) { return (*forcing)(x, t); }));
    };
  }
  auto cached = std::make_shared<Eigen::VectorXd>(
      assemble_load(V, VectorFunction([&](int, const Vec3& x) { return (*forcing)(x, 0.0); })));
  const double t_off = config.t_off;
  return [cached, t_off, n](double t) { return t > t_off ? Eigen::VectorXd::Zero(n).eval() : *cached; };
}

}  // namespace surfhodge
