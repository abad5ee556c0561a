// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfhodge/assembly.hpp"
#include "surfhodge/flow.hpp"
#include "surfhodge/hodge.hpp"
#include "surfhodge/output.hpp"

namespace surfhodge {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
  std::string verb;
  std::string mesh;
  std::string config;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out_dir;
  bool compare_saddle = false;
  std::string field = "random";
  std::string basis;
  std::string corpus;
};

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

class Timer {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void stop(RunManifest& m, const std::string& phase) const {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - t0_;
    m.timings.emplace_back(phase, d.count());
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

/// Shared state of one command invocation.
class Run {
 public:
  Run(const Options& opt, std::vector<std::string> argv, std::ostream& out, std::ostream& err)
      : out_(out), err_(err) {
    manifest_.command = opt.verb;
    manifest_.argv = std::move(argv);
    if (!opt.config.empty()) config_ = load_run_config(opt.config);
    if (!opt.mesh.empty()) config_.mesh = opt.mesh;
    if (opt.k) config_.flow.k = *opt.k;
    if (opt.seed) config_.flow.seed = *opt.seed;
    if (opt.tol) config_.tol = *opt.tol;
    if (opt.compare_saddle) config_.compare_saddle = true;
    if (!opt.basis.empty()) config_.basis = opt.basis;
    validate(config_.flow);
    if (!(config_.tol > 0)) throw Error(Errc::NonpositiveParameter, "tol must be positive");
    manifest_.config = to_key_values(config_);
    manifest_.seed = config_.flow.seed;
    out_dir_ = opt.out_dir.empty() ? fs::path(".") : fs::path(opt.out_dir);
  }

  const RunConfig& config() const { return config_; }
  RunManifest& manifest() { return manifest_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  const fs::path& out_dir() const { return out_dir_; }

  const SurfaceMesh& mesh() {
    if (!mesh_) {
      if (config_.mesh.empty()) throw Error(Errc::ConfigError, "no mesh given (--mesh or mesh = ... in --config)");
      Timer t;
      mesh_.emplace(load_mesh(config_.mesh));
      t.stop(manifest_, "load_mesh");
      manifest_.mesh = config_.mesh.string();
      manifest_.mesh_checksum = mesh_checksum(*mesh_);
    }
    return *mesh_;
  }

  const HodgeContext& context() {
    if (!ctx_) {
      const SurfaceMesh& m = mesh();
      Timer t;
      ctx_ = std::make_unique<HodgeContext>(m, config_.flow.k);
      t.stop(manifest_, "assemble");
    }
    return *ctx_;
  }

  const HarmonicBasis& basis() {
    if (!basis_) {
      const HodgeContext& ctx = context();
      Timer t;
      if (!config_.basis.empty()) {
        basis_ = load_basis(config_.basis);
        check_basis(ctx, *basis_);
        t.stop(manifest_, "load_basis");
      } else {
        basis_ = harmonic_basis(ctx, {config_.flow.seed, config_.tol, -1});
        t.stop(manifest_, "harmonic_basis");
      }
    }
    return *basis_;
  }

  fs::path output(const std::string& name) {
    fs::create_directories(out_dir_);
    manifest_.outputs.push_back(name);
    return out_dir_ / name;
  }

  void write_json(const std::string& name, const Json& j) {
    const fs::path p = output(name);
    std::ofstream f(p);
    if (!f) throw Error(Errc::IoError, "cannot write " + p.string());
    f << j.dump(2) << '\n';
  }

  void finish() {
    fs::create_directories(out_dir_);
    const fs::path p = out_dir_ / (manifest_.command + "_manifest.json");
    std::ofstream f(p);
    if (!f) throw Error(Errc::IoError, "cannot write " + p.string());
    f << manifest_json(manifest_) << '\n';
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  RunConfig config_;
  RunManifest manifest_;
  fs::path out_dir_;
  std::optional<SurfaceMesh> mesh_;
  std::unique_ptr<HodgeContext> ctx_;
  std::optional<HarmonicBasis> basis_;
};

Json topology_json(const SurfaceMesh& mesh, const TopologySummary& t) {
  Json j;
  j["vertices"] = t.num_vertices;
  j["edges"] = t.num_edges;
  j["triangles"] = t.num_triangles;
  j["interior_vertices"] = t.interior_vertices;
  j["boundary_vertices"] = t.boundary_vertices;
  j["interior_edges"] = t.interior_edges;
  j["boundary_edges"] = t.boundary_edges;
  j["components"] = t.num_components;
  j["boundary_loops"] = t.num_boundary_loops;
  j["euler_characteristic"] = t.euler_characteristic;
  j["b0"] = t.b0;
  j["b1"] = t.b1;
  j["b2"] = t.b2;
  j["closed"] = t.closed();
  j["flipped_triangles"] = mesh.flipped_triangles();
  j["checksum"] = hex(mesh_checksum(mesh));
  return j;
}

Eigen::VectorXd random_coefficients(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

/// Largest |(h_i, rot phi_j)| / |rot phi_j| over basis fields and S basis functions.
double cross_gram(const HodgeContext& ctx, const HarmonicBasis& basis) {
  if (basis.size() == 0) return 0.0;
  const Eigen::MatrixXd C = (ctx.embedding().transpose() * (ctx.mass() * basis.matrix())).transpose();
  const SparseMatrix& K = ctx.rot_laplacian();
  double worst = 0.0;
  for (int j = 0; j < C.cols(); ++j) {
    const double d = K.coeff(j, j);
    if (d > 0) worst = std::max(worst, C.col(j).cwiseAbs().maxCoeff() / std::sqrt(d));
  }
  return worst;
}

double gram_defect(const HodgeContext& ctx, const HarmonicBasis& basis) {
  if (basis.size() == 0) return 0.0;
  const Eigen::MatrixXd G = gram_matrix(basis.fields, ctx.mass());
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

double max_divergence(const HodgeContext& ctx, const HarmonicBasis& basis) {
  double worst = 0.0;
  for (const auto& h : basis.fields) worst = std::max(worst, divergence_norm(FeField(ctx.V(), h)));
  return worst;
}

Json vector_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

std::vector<CellVectors> component_vectors(const HodgeContext& ctx, const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& psi) {
  const Eigen::VectorXd rot = ctx.embedding() * psi;
  return {{"u", centroid_values(FeField(ctx.V(), u))},
          {"u_rot", centroid_values(FeField(ctx.V(), rot))},
          {"u_harm", centroid_values(FeField(ctx.V(), Eigen::VectorXd(u - rot)))}};
}

int cmd_topology(Run& run, const Options& opt) {
  const SurfaceMesh& mesh = run.mesh();
  const TopologySummary t = analyze_topology(mesh);
  Json j;
  j["mesh"] = run.config().mesh.string();
  j.update(topology_json(mesh, t));
  run.out() << j.dump(2) << '\n';
  if (!opt.out_dir.empty()) {
    run.write_json("topology.json", j);
    run.finish();
  }
  return kExitOk;
}

int cmd_harmonic(Run& run) {
  const HodgeContext& ctx = run.context();
  const HarmonicBasis& basis = run.basis();
  save_basis(run.output("harmonic_basis.json"), basis);
  Json j;
  j["mesh"] = run.config().mesh.string();
  j["k"] = ctx.k();
  j["seed"] = basis.seed;
  j["b1"] = basis.b1;
  j["fields"] = basis.size();
  j["num_dofs"] = basis.num_dofs;
  j["attempts"] = basis.attempts;
  j["gram_residual"] = gram_defect(ctx, basis);
  j["rot_cross_gram"] = cross_gram(ctx, basis);
  j["max_divergence"] = max_divergence(ctx, basis);
  run.write_json("harmonic_report.json", j);
  run.finish();
  run.out() << "b1=" << basis.b1 << " fields=" << basis.size() << " attempts=" << basis.attempts << '\n'
            << j.dump(2) << '\n';
  return kExitOk;
}

Eigen::VectorXd input_field(Run& run, const HodgeContext& ctx, const std::string& spec) {
  if (spec == "random") return random_coefficients(ctx.V().num_dofs(), run.config().flow.seed);
  if (spec.rfind("psi:", 0) == 0) {
    const Expression psi = Expression::parse(spec.substr(4));
    const FeField s = interpolate(ctx.S(), ScalarFunction([&](int, const Vec3& x) { return psi(x); }));
    return ctx.embedding() * s.coeffs();
  }
  if (spec.rfind("vector:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(7));
    std::string part;
    while (std::getline(ss, part, ';')) parts.push_back(part);
    if (parts.size() != 3) throw Error(Errc::ConfigError, "vector field needs three ';' separated components");
    const Expression fx = Expression::parse(parts[0]), fy = Expression::parse(parts[1]),
                     fz = Expression::parse(parts[2]);
    return interpolate(ctx.V(), VectorFunction([&](int, const Vec3& x) {
             return Vec3(fx(x), fy(x), fz(x));
           })).coeffs();
  }
  throw Error(Errc::ConfigError, "unknown field '" + spec + "' (random, psi:<expr> or vector:<fx>;<fy>;<fz>)");
}

int cmd_decompose(Run& run, const Options& opt) {
  const HodgeContext& ctx = run.context();
  const HarmonicBasis& basis = run.basis();
  const Eigen::VectorXd v = input_field(run, ctx, opt.field);
  Timer t;
  const HodgeComponents c = decompose(ctx, basis, FeField(ctx.V(), v));
  t.stop(run.manifest(), "decompose");
  const SparseMatrix& M = ctx.mass();
  const double nv = m_norm(M, v), nr = m_norm(M, c.rot_part), nh = m_norm(M, c.harmonic_part),
               ng = m_norm(M, c.gradient_part);
  const double pyth = std::abs(nv * nv - nr * nr - nh * nh - ng * ng - c.residual_norm * c.residual_norm);
  Json j;
  j["mesh"] = run.config().mesh.string();
  j["k"] = ctx.k();
  j["field"] = opt.field;
  j["norm"] = nv;
  j["rot_norm"] = nr;
  j["harmonic_norm"] = nh;
  j["gradient_norm"] = ng;
  j["residual_norm"] = c.residual_norm;
  j["pythagoras_defect"] = nv > 0 ? pyth / (nv * nv) : pyth;
  j["harmonic_coefficients"] = vector_json(c.h);
  const fs::path vtk = run.output("decompose.vtk");
  write_vtk(vtk, ctx.mesh(),
            {{"v", centroid_values(FeField(ctx.V(), v))},
             {"v_rot", centroid_values(FeField(ctx.V(), c.rot_part))},
             {"v_harm", centroid_values(FeField(ctx.V(), c.harmonic_part))},
             {"v_grad", centroid_values(FeField(ctx.V(), c.gradient_part))}},
            {{"psi", vertex_values(FeField(ctx.S(), c.psi))}}, "decompose");
  run.write_json("decompose_report.json", j);
  run.finish();
  run.out() << j.dump(2) << '\n';
  return kExitOk;
}

Json saddle_comparison(const HodgeContext& ctx, const SparseMatrix& A, const Eigen::VectorXd& F,
                       const ReducedSolution& red, const Eigen::VectorXd& p_red) {
  const SaddleSolution sad = solve_stokes_saddle(ctx, A, F, red.kernel);
  const SparseMatrix& M = ctx.mass();
  const double nu = m_norm(M, sad.u), np = m_norm(ctx.pressure_mass(), sad.p);
  const double du = m_norm(M, Eigen::VectorXd(red.state.u - sad.u));
  const double dp = m_norm(ctx.pressure_mass(), Eigen::VectorXd(p_red - sad.p));
  Json j;
  j["velocity_difference"] = nu > 0 ? du / nu : du;
  j["pressure_difference"] = np > 0 ? dp / np : dp;
  j["saddle_velocity_norm"] = nu;
  j["saddle_pressure_norm"] = np;
  return j;
}

int cmd_stokes(Run& run) {
  const HodgeContext& ctx = run.context();
  const HarmonicBasis& basis = run.basis();
  const FlowConfig& fc = run.config().flow;
  Timer t;
  const SparseMatrix A = viscous_operator(ctx, fc);
  const Eigen::VectorXd F = make_forcing_load(ctx.V(), run.config().forcing)(0.0);
  t.stop(run.manifest(), "assemble_flow");
  t.start();
  const ReducedSolution red = solve_stokes_reduced(ctx, basis, A, F, fc);
  const Eigen::VectorXd p = reconstruct_pressure(ctx, A, F, red.state.u);
  t.stop(run.manifest(), "solve");
  const SparseMatrix& M = ctx.mass();
  const double nu = m_norm(M, red.state.u);
  Json j;
  j["mesh"] = run.config().mesh.string();
  j["k"] = ctx.k();
  j["velocity_dofs"] = ctx.V().num_dofs();
  j["streamfunction_dofs"] = ctx.S().num_dofs();
  j["b1"] = basis.size();
  j["velocity_norm"] = nu;
  j["kinetic_energy"] = red.state.kinetic_energy;
  j["divergence_norm"] = divergence_norm(FeField(ctx.V(), red.state.u));
  j["pressure_norm"] = m_norm(ctx.pressure_mass(), p);
  j["harmonic_coefficients"] = vector_json(red.state.h);
  j["max_speed"] = max_speed(FeField(ctx.V(), red.state.u));
  j["dense_fallback"] = red.dense_fallback;
  j["kernel_dimension"] = red.kernel.size();
  j["sparse_solves"] = red.sparse_solves;
  if (run.config().compare_saddle) {
    t.start();
    j["saddle"] = saddle_comparison(ctx, A, F, red, p);
    t.stop(run.manifest(), "saddle");
    run.out() << "saddle L2 discrepancy: " << j["saddle"]["velocity_difference"].get<double>()
              << " (pressure " << j["saddle"]["pressure_difference"].get<double>() << ")\n";
  }
  const std::string& prefix = run.config().prefix;
  write_vtk(run.output(prefix + "_stokes.vtk"), ctx.mesh(), component_vectors(ctx, red.state.u, red.state.psi),
            {{"psi", vertex_values(FeField(ctx.S(), red.state.psi))}}, "stokes");
  run.write_json(prefix + "_stokes_report.json", j);
  run.finish();
  run.out() << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_nse(Run& run) {
  const HodgeContext& ctx = run.context();
  const HarmonicBasis& basis = run.basis();
  const RunConfig& rc = run.config();
  const FlowConfig& fc = rc.flow;
  const ForcingLoad forcing = make_forcing_load(ctx.V(), rc.forcing);
  SimulationOptions so;
  so.out_dir = run.out_dir();
  so.prefix = rc.prefix;
  int warnings_shown = 0;
  so.warn = [&](const std::string& msg) {
    if (warnings_shown++ < 5) run.err() << "warning: " << msg << '\n';
  };
  Json j;
  j["mesh"] = rc.mesh.string();
  j["k"] = ctx.k();
  j["b1"] = basis.size();
  Timer t;
  if (rc.initial == InitialKind::Zero) {
    so.initial = make_state(ctx, basis, 0.0, Eigen::VectorXd::Zero(ctx.S().num_dofs()),
                            Eigen::VectorXd::Zero(basis.size()));
  } else if (rc.compare_saddle) {
    const SparseMatrix A = viscous_operator(ctx, fc);
    const Eigen::VectorXd F = forcing(0.0);
    const ReducedSolution red = solve_stokes_reduced(ctx, basis, A, F, fc);
    j["saddle"] = saddle_comparison(ctx, A, F, red, reconstruct_pressure(ctx, A, F, red.state.u));
    so.initial = red.state;
    run.out() << "saddle L2 discrepancy: " << j["saddle"]["velocity_difference"].get<double>() << '\n';
  }
  fs::create_directories(run.out_dir());
  const SimulationResult res = run_simulation(ctx, basis, fc, forcing, so);
  t.stop(run.manifest(), "simulate");
  for (const auto& f : res.files) run.manifest().outputs.push_back(f.filename().string());
  double worst_div = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    const SeriesRow& r = res.series[i];
    const double un = std::sqrt(2.0 * r.kinetic_energy);
    worst_div = std::max(worst_div, un > 0 ? r.div_norm / un : r.div_norm);
    if (i > 0 && r.kinetic_energy > res.series[i - 1].kinetic_energy * (1 + 1e-10)) monotone = false;
  }
  j["steps"] = res.series.empty() ? 0 : res.series.back().step;
  j["t_end"] = res.final_state.t;
  j["initial_kinetic_energy"] = res.series.front().kinetic_energy;
  j["final_kinetic_energy"] = res.final_state.kinetic_energy;
  j["energy_non_increasing"] = monotone;
  j["max_relative_divergence"] = worst_div;
  j["final_harmonic_coefficients"] = vector_json(res.final_state.h);
  j["cfl_warnings"] = res.cfl_warnings;
  j["snapshots"] = res.files.size() - 1;
  run.write_json(rc.prefix + "_nse_report.json", j);
  run.finish();
  run.out() << j.dump(2) << '\n';
  return kExitOk;
}

struct Check {
  std::string name;
  double value;
  double limit;
  bool exact = false;
  bool pass() const { return exact ? value == limit : value <= limit; }
};

int cmd_verify(Run& run, const Options& opt) {
  std::vector<fs::path> meshes;
  if (!opt.corpus.empty()) {
    if (!fs::is_directory(opt.corpus)) throw Error(Errc::IoError, "not a directory: " + opt.corpus);
    for (const auto& e : fs::directory_iterator(opt.corpus)) {
      const std::string ext = e.path().extension().string();
      if (ext == ".off" || ext == ".obj") meshes.push_back(e.path());
    }
    std::sort(meshes.begin(), meshes.end());
    if (meshes.empty()) throw Error(Errc::IoError, "no .off or .obj files in " + opt.corpus);
  } else {
    if (run.config().mesh.empty()) throw Error(Errc::ConfigError, "verify needs --mesh or --corpus");
    meshes.push_back(run.config().mesh);
  }
  const int k_max = opt.k.value_or(2);
  if (k_max < 0) throw Error(Errc::ConfigError, "k must be nonnegative");
  const std::uint64_t seed = run.config().flow.seed;
  Json report = Json::array();
  bool all = true;
  Timer timer;
  for (const auto& path : meshes) {
    const SurfaceMesh mesh = load_mesh(path);
    const TopologySummary topo = analyze_topology(mesh);
    Json mj;
    mj["mesh"] = path.string();
    mj["flipped_triangles"] = mesh.flipped_triangles();
    mj["b1"] = topo.b1;
    Json kj = Json::array();
    for (int k = 0; k <= k_max; ++k) {
      const HodgeContext ctx(mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx, {seed, run.config().tol, -1});
      const DimensionReport dim = verify_dimension(topo, k);
      const SparseMatrix& M = ctx.mass();
      const Eigen::VectorXd psi = random_coefficients(ctx.S().num_dofs(), seed);
      const Eigen::VectorXd rot = ctx.embedding() * psi;
      const Eigen::VectorXd v = random_coefficients(ctx.V().num_dofs(), seed + 1);
      const HodgeComponents c = decompose(ctx, basis, FeField(ctx.V(), v));
      const double nv = m_norm(M, v), nr = m_norm(M, c.rot_part), nh = m_norm(M, c.harmonic_part),
                   ng = m_norm(M, c.gradient_part);
      const Eigen::VectorXd recon = c.rot_part + c.harmonic_part + c.gradient_part;
      const std::vector<Check> checks{
          {"dimension_count", static_cast<double>(dim.difference), static_cast<double>(topo.b1), true},
          {"basis_size", static_cast<double>(basis.size()), static_cast<double>(topo.b1), true},
          {"gram_identity", gram_defect(ctx, basis), 1e-10},
          {"rot_orthogonality", cross_gram(ctx, basis), 1e-10},
          {"harmonic_divergence", max_divergence(ctx, basis), 1e-10},
          {"div_rot", divergence_norm(FeField(ctx.V(), rot)) / m_norm(M, rot), 1e-12},
          {"reconstruction", m_norm(M, Eigen::VectorXd(v - recon)) / nv, 1e-10},
          {"pythagoras", std::abs(nv * nv - nr * nr - nh * nh - ng * ng) / (nv * nv), 1e-10},
      };
      Json cj;
      cj["k"] = k;
      for (const Check& ch : checks) {
        cj[ch.name] = {{"value", ch.value}, {"limit", ch.limit}, {"pass", ch.pass()}};
        all = all && ch.pass();
        run.out() << (ch.pass() ? "PASS " : "FAIL ") << path.filename().string() << " k=" << k << " "
                  << ch.name << " " << ch.value << '\n';
      }
      kj.push_back(cj);
    }
    mj["degrees"] = kj;
    report.push_back(mj);
  }
  timer.stop(run.manifest(), "verify");
  Json j;
  j["k_max"] = k_max;
  j["seed"] = seed;
  j["meshes"] = report;
  j["pass"] = all;
  if (!opt.out_dir.empty()) {
    run.write_json("verify_report.json", j);
    run.finish();
  }
  run.out() << (all ? "verify: all checks passed" : "verify: FAILED") << '\n';
  return all ? kExitOk : kExitAlgorithm;
}

}  // namespace

int exit_code(Errc code) {
  switch (code) {
    case Errc::SingularMatrix:
    case Errc::NotSPD:
    case Errc::SolverFailure:
    case Errc::SingularSchur:
      return kExitSolver;
    case Errc::NotDivergenceFree:
    case Errc::SingularOperator:
    case Errc::MaxAttemptsExceeded:
    case Errc::NaNDetected:
    case Errc::DimensionMismatch:
      return kExitAlgorithm;
    default:
      return kExitInput;
  }
}

std::string manifest_json(const RunManifest& m) {
  Json j;
  j["tool"] = "surfhodge";
  j["version"] = m.version;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["mesh"] = m.mesh;
  j["mesh_checksum"] = hex(m.mesh_checksum);
  j["seed"] = m.seed;
  Json t;
  for (const auto& [phase, seconds] : m.timings) t[phase] = seconds;
  j["timings"] = t;
  j["outputs"] = m.outputs;
  return j.dump(2);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hodge decomposition and divergence-free flow on triangulated surfaces", "surfhodge"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opt;
  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--mesh", opt.mesh, "OFF or OBJ surface mesh");
    sub->add_option("--config", opt.config, "key = value configuration file");
    sub->add_option("--k", opt.k, "velocity degree (verify: largest degree)");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--tol", opt.tol, "harmonic basis drop tolerance");
    sub->add_option("--out-dir", opt.out_dir, "output directory");
  };
  auto* topo = app.add_subcommand("topology", "counts, Euler characteristic and Betti numbers");
  auto* harm = app.add_subcommand("harmonic", "orthonormal basis of discrete harmonic fields");
  auto* deco = app.add_subcommand("decompose", "three-way splitting of a vector field");
  auto* stokes = app.add_subcommand("stokes", "steady Stokes solve");
  auto* nse = app.add_subcommand("nse", "unsteady Navier-Stokes run");
  auto* verify = app.add_subcommand("verify", "dimension and structure checks");
  for (auto* s : {topo, harm, deco, stokes, nse, verify}) common(s);
  for (auto* s : {deco, stokes, nse}) s->add_option("--basis", opt.basis, "precomputed harmonic basis file");
  deco->add_option("--field", opt.field, "random | psi:<expr> | vector:<fx>;<fy>;<fz>");
  for (auto* s : {stokes, nse})
    s->add_flag("--compare-saddle", opt.compare_saddle, "also solve the velocity-pressure system");
  verify->add_option("--corpus", opt.corpus, "directory of .off/.obj meshes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  for (auto* s : app.get_subcommands()) opt.verb = s->get_name();

  try {
    Run run(opt, args, out, err);
    if (opt.verb == "topology") return cmd_topology(run, opt);
    if (opt.verb == "harmonic") return cmd_harmonic(run);
    if (opt.verb == "decompose") return cmd_decompose(run, opt);
    if (opt.verb == "stokes") return cmd_stokes(run);
    if (opt.verb == "nse") return cmd_nse(run);
    return cmd_verify(run, opt);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAlgorithm;
  }
}

}  // namespace surfhodge
