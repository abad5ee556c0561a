// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// all criteria pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "surfhodge/assembly.hpp"
#include "surfhodge/flow.hpp"
#include "surfhodge/hodge.hpp"
#include "surfhodge/meshgen.hpp"

using namespace surfhodge;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    failures += (pass ? "" : "; ") + what;
    pass = false;
  }
};

struct NamedMesh {
  std::string name;
  SurfaceMesh mesh;
  int b1;  // expected first Betti number
};

std::vector<NamedMesh> corpus() {
  std::vector<NamedMesh> m;
  m.push_back({"tetrahedron", meshgen::tetrahedron(), 0});
  m.push_back({"icosphere", meshgen::icosphere(1), 0});
  m.push_back({"torus", meshgen::torus(6, 4), 2});
  m.push_back({"genus2", meshgen::genus_plate(2), 4});
  m.push_back({"holed_sphere", meshgen::holed_sphere(2, 4), 3});
  m.push_back({"trefoil", meshgen::trefoil_tube(24, 4), 2});
  return m;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Eigen::VectorXd gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

// Sum of three random plane waves with wavelengths of the mesh size.
VectorFunction smooth_forcing(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g;
  std::array<Vec3, 3> amp, dir;
  std::array<double, 3> phase;
  for (int i = 0; i < 3; ++i) {
    amp[i] = Vec3(g(rng), g(rng), g(rng));
    dir[i] = Vec3(g(rng), g(rng), g(rng)) * (2.0 / scale);
    phase[i] = g(rng);
  }
  return [=](int, const Vec3& x) {
    Vec3 f = Vec3::Zero();
    for (int i = 0; i < 3; ++i) f += amp[i] * std::sin(dir[i].dot(x) + phase[i]);
    return f;
  };
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const SparseMatrix& M) {
  const double nb = m_norm(M, b);
  const Eigen::VectorXd d = a - b;
  return nb > 0 ? m_norm(M, d) / nb : m_norm(M, d);
}

void betti(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const NamedMesh& nm : corpus()) {
    for (int k = 0; k <= 2; ++k) {
      const HodgeContext ctx(nm.mesh, k);
      const int got = harmonic_basis(ctx).size();
      o.require(got == nm.b1, nm.name + " k=" + std::to_string(k) + " gave " + std::to_string(got));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 30.0, "runtime " + sci(secs) + " s");
  o.detail << "6 meshes x k=0..2, " << sci(secs) << " s";
}

void table_counts(Outcome& o) {
  // closed genus-1 counts: |T| = 3490, |E| = 3|T|/2, |V| = |E| - |T|
  const TopologySummary topo = make_topology(1745, 5235, 3490);
  o.require(topo.b1 == 2, "synthetic b1 " + std::to_string(topo.b1));
  o.require(count_dofs(topo, SpaceKind::Lagrange, 4, Constraint::ZeroMean).total == 27920, "Lagrange 4");
  o.require(count_dofs(topo, SpaceKind::BDM, 3, Constraint::ZeroNormalTrace).total == 48860, "BDM 3");
  o.require(count_dofs(topo, SpaceKind::DGPressure, 2, Constraint::None).total == 20940, "DG 2");
  o.require(count_dofs(topo, SpaceKind::FacetTangential, 3, Constraint::None).total == 20940, "facet 3");
  const SurfaceMesh mesh = meshgen::torus(349, 5, 40.0, 3.0);
  const TopologySummary real = analyze_topology(mesh);
  o.require(real.num_triangles == 3490 && real.b1 == 2, "349 x 5 torus topology");
  o.require(build_space(mesh, SpaceKind::Lagrange, 4, Constraint::ZeroMean).num_dofs() == 27920, "built Lagrange 4");
  o.require(build_space(mesh, SpaceKind::BDM, 3, Constraint::ZeroNormalTrace).num_dofs() == 48860, "built BDM 3");
  o.require(build_space(mesh, SpaceKind::DGPressure, 2).num_dofs() == 20940, "built DG 2");
  o.require(build_space(mesh, SpaceKind::FacetTangential, 3).num_dofs() == 20940, "built facet 3");
  o.detail << "27920 / 48860 / 20940 / 20940, b1 = 2";
}

void structure(Outcome& o) {
  double gram = 0, cross = 0, div = 0, divrot = 0, recon = 0, pyth = 0;
  std::mt19937_64 rng(3);
  std::vector<NamedMesh> meshes = corpus();
  meshes.push_back({"flat_patch", meshgen::flat_grid(4, 4), 0});
  for (const NamedMesh& nm : meshes) {
    for (int k = 0; k <= 2; ++k) {
      const HodgeContext ctx(nm.mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx);
      const SparseMatrix& M = ctx.mass();
      const SparseMatrix& E = ctx.embedding();
      const int b = basis.size();
      if (b > 0) {
        const Eigen::MatrixXd H = basis.matrix();
        const Eigen::MatrixXd G = H.transpose() * (M * H);
        gram = std::max(gram, (G - Eigen::MatrixXd::Identity(b, b)).cwiseAbs().maxCoeff());
        // (h_i, rot phi_j) / |rot phi_j| over all S basis functions
        const Eigen::MatrixXd C = H.transpose() * (M * E);
        for (int j = 0; j < C.cols(); ++j) {
          const Eigen::VectorXd col = E.col(j);
          const double n = m_norm(M, col);
          if (n > 0) cross = std::max(cross, C.col(j).cwiseAbs().maxCoeff() / n);
        }
        for (const auto& h : basis.fields) div = std::max(div, divergence_norm(FeField(ctx.V(), h)));
      }
      for (int trial = 0; trial < 3; ++trial) {
        const Eigen::VectorXd rot = E * gaussian(ctx.S().num_dofs(), rng);
        divrot = std::max(divrot, divergence_norm(FeField(ctx.V(), rot)) / m_norm(M, rot));
        const Eigen::VectorXd v = gaussian(ctx.V().num_dofs(), rng);
        const HodgeComponents c = decompose(ctx, basis, FeField(ctx.V(), v));
        const double nv = m_norm(M, v);
        const Eigen::VectorXd sum = c.rot_part + c.harmonic_part + c.gradient_part;
        recon = std::max(recon, m_norm(M, Eigen::VectorXd(v - sum)) / nv);
        const double nr = m_norm(M, c.rot_part), nh = m_norm(M, c.harmonic_part), ng = m_norm(M, c.gradient_part);
        pyth = std::max(pyth, std::abs(nv * nv - nr * nr - nh * nh - ng * ng) / (nv * nv));
      }
    }
  }
  o.require(gram <= 1e-10, "Gram " + sci(gram));
  o.require(cross <= 1e-10, "cross-Gram " + sci(cross));
  o.require(div <= 1e-10, "div h " + sci(div));
  o.require(divrot <= 1e-12, "div rot " + sci(divrot));
  o.require(recon <= 1e-10, "reconstruction " + sci(recon));
  o.require(pyth <= 1e-10, "Pythagoras " + sci(pyth));
  o.detail << "Gram " << sci(gram) << ", cross " << sci(cross) << ", div h " << sci(div)
           << ", div rot " << sci(divrot) << ", recon " << sci(recon) << ", Pythagoras " << sci(pyth);
}

struct FlowCase {
  std::string name;
  SurfaceMesh mesh;
};

std::vector<FlowCase> flow_meshes() {
  std::vector<FlowCase> m;
  m.push_back({"torus", meshgen::torus(6, 4)});
  m.push_back({"holed_sphere", meshgen::holed_sphere(2, 4)});
  return m;
}

void equivalence(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  double du = 0, dp = 0;
  int solves = 0;
  std::mt19937_64 rng(4);
  for (const FlowCase& fc : flow_meshes()) {
    for (int k = 1; k <= 2; ++k) {
      const HodgeContext ctx(fc.mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx);
      FlowConfig cfg;
      cfg.k = k;
      const SparseMatrix A = viscous_operator(ctx, cfg);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd F =
            assemble_load(ctx.V(), smooth_forcing(rng, fc.mesh.bounding_box_diagonal()));
        const ReducedSolution red = solve_stokes_reduced(ctx, basis, A, F, cfg);
        const SaddleSolution sad = solve_stokes_saddle(ctx, A, F, red.kernel);
        const Eigen::VectorXd p = reconstruct_pressure(ctx, A, F, red.state.u);
        du = std::max(du, rel(red.state.u, sad.u, ctx.mass()));
        dp = std::max(dp, rel(p, sad.p, ctx.pressure_mass()));
        o.require(m_norm(ctx.mass(), sad.u) > 0, fc.name + " zero velocity");
        ++solves;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(du <= 1e-8, "velocity " + sci(du));
  o.require(dp <= 1e-8, "pressure " + sci(dp));
  o.require(secs < 120.0, "runtime " + sci(secs) + " s");
  o.detail << solves << " forcings, velocity " << sci(du) << ", pressure " << sci(dp) << ", "
           << sci(secs) << " s";
}

void pressure_robustness(Outcome& o) {
  double worst = 0;
  std::mt19937_64 rng(5);
  for (const FlowCase& fc : flow_meshes()) {
    for (int k = 1; k <= 2; ++k) {
      const HodgeContext ctx(fc.mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx);
      FlowConfig cfg;
      cfg.k = k;
      const SparseMatrix A = viscous_operator(ctx, cfg);
      const Eigen::VectorXd F = assemble_load(ctx.V(), smooth_forcing(rng, fc.mesh.bounding_box_diagonal()));
      const Eigen::VectorXd u0 = solve_stokes_reduced(ctx, basis, A, F, cfg).state.u;
      const Eigen::VectorXd g = gradient_load(ctx, gaussian(ctx.Q().num_dofs(), rng));
      // gradient perturbation as large as the load itself
      const Eigen::VectorXd Fp = F + (F.norm() / g.norm()) * 10.0 * g;
      const Eigen::VectorXd u1 = solve_stokes_reduced(ctx, basis, A, Fp, cfg).state.u;
      worst = std::max(worst, rel(u1, u0, ctx.mass()));
    }
  }
  o.require(worst <= 1e-10, "velocity change " + sci(worst));
  o.detail << "velocity change " << sci(worst);
}

void schur(Outcome& o) {
  double worst = 0;
  std::mt19937_64 rng(6);
  for (const FlowCase& fc : flow_meshes()) {
    for (int k = 1; k <= 2; ++k) {
      const HodgeContext ctx(fc.mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx);
      const SparseMatrix A = assemble_sip(ctx.V(), 0.1, default_penalty(k));
      const Eigen::VectorXd F = assemble_load(ctx.V(), smooth_forcing(rng, fc.mesh.bounding_box_diagonal()));
      const Eigen::VectorXd gauge = ctx.closed() ? ctx.s_mean() : Eigen::VectorXd();
      const BlockSystem sys = build_reduced_system(A, F, ctx.embedding(), basis.matrix(), gauge);
      const SchurResult r = schur_solve(sys);
      o.require(r.sparse_solves == basis.size() + 1,
                fc.name + " k=" + std::to_string(k) + " used " + std::to_string(r.sparse_solves) + " solves");
      const auto [xs, xh] = monolithic_solve(sys);
      Eigen::VectorXd a(xs.size() + xh.size()), b(xs.size() + xh.size());
      a << r.x_S, r.x_H;
      b << xs, xh;
      worst = std::max(worst, (a - b).norm() / b.norm());
    }
  }
  o.require(worst <= 1e-10, "difference " + sci(worst));
  o.detail << "difference " << sci(worst) << ", N_H + 1 solves on 4 systems";
}

void energy(Outcome& o) {
  const SurfaceMesh mesh = meshgen::torus(6, 4);
  const HodgeContext ctx(mesh, 1);
  const HarmonicBasis basis = harmonic_basis(ctx);
  FlowConfig cfg;
  cfg.k = 1;
  cfg.mu = 0.1;
  std::mt19937_64 rng(7);
  const SparseMatrix A = viscous_operator(ctx, cfg);
  const Eigen::VectorXd F0 = assemble_load(ctx.V(), smooth_forcing(rng, mesh.bounding_box_diagonal()));
  FlowState state = solve_stokes_reduced(ctx, basis, A, F0, cfg).state;
  cfg.dt = std::min(0.01, 0.25 * mesh.min_edge_length() / max_speed(FeField(ctx.V(), state.u)));
  NavierStokesStepper stepper(ctx, basis, cfg);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ctx.V().num_dofs());
  double worst_growth = -INFINITY, worst_div = 0;
  const double e0 = state.kinetic_energy;
  for (int n = 0; n < 200; ++n) {
    const double before = state.kinetic_energy;
    state = stepper.step(state, zero);
    worst_growth = std::max(worst_growth, (state.kinetic_energy - before) / before);
    worst_div = std::max(worst_div, divergence_norm(FeField(ctx.V(), state.u)) / m_norm(ctx.mass(), state.u));
  }
  o.require(worst_growth <= 1e-10, "energy growth " + sci(worst_growth));
  o.require(worst_div <= 1e-10, "divergence " + sci(worst_div));
  o.require(stepper.cfl_warnings() == 0, "CFL warnings");
  o.detail << "200 steps dt=" << sci(cfg.dt) << ", E " << sci(e0) << " -> "
           << sci(state.kinetic_energy) << ", max step growth " << sci(worst_growth) << ", div " << sci(worst_div);
}

void p0_completeness(Outcome& o) {
  double worst = 0;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (const auto& [nx, ny] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {5, 5}, {8, 6}}) {
    const SurfaceMesh mesh = meshgen::flat_grid(nx, ny);
    const TopologySummary t = analyze_topology(mesh);
    o.require(2 * t.num_triangles == t.interior_vertices + t.num_edges - 1,
              "dimension identity on " + std::to_string(nx) + "x" + std::to_string(ny));
    const HodgeContext ctx(mesh, 0);
    const HarmonicBasis basis = harmonic_basis(ctx);
    o.require(basis.size() == 0, "flat patch has harmonic fields");
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Vec3> v(mesh.num_triangles());
      for (auto& x : v) x = Vec3(g(rng), g(rng), 0.0);
      const P0Decomposition d = decompose_p0_incomplete(ctx, basis, v);
      worst = std::max(worst, d.remainder_norm / p0_norm(mesh, v));
    }
  }
  o.require(worst <= 1e-12, "remainder " + sci(worst));
  o.detail << "remainder " << sci(worst) << ", 2|T| = |V_I| + |E| - 1 on 4 grids";
}

void qualitative(Outcome& o) {
  // trefoil tube: jet forced in the half x < 40
  {
    const SurfaceMesh mesh = meshgen::trefoil_tube(24, 4);
    const HodgeContext ctx(mesh, 1);
    const HarmonicBasis basis = harmonic_basis(ctx);
    FlowConfig cfg;
    cfg.k = 1;
    cfg.mu = 0.1;
    cfg.dt = 0.05;
    cfg.t_end = 500 * cfg.dt;
    const Eigen::VectorXd F = assemble_load(ctx.V(), VectorFunction([](int, const Vec3& x) {
                                              return x.x() < 40 ? Vec3(0, 4e-5, 0) : Vec3::Zero();
                                            }));
    const SimulationResult r = run_simulation(ctx, basis, cfg, [&](double) { return F; });
    double min_h = INFINITY, min_ratio = INFINITY;
    for (const SeriesRow& row : r.series) {
      if (row.step < 100) continue;
      min_h = std::min(min_h, row.harmonic_norm);
      min_ratio = std::min(min_ratio, row.harmonic_norm / std::sqrt(2 * row.kinetic_energy));
    }
    o.require(r.series.size() == 501, "trefoil steps");
    o.require(r.final_state.u.allFinite(), "trefoil NaN");
    o.require(min_h > 0 && min_ratio > 1e-3, "trefoil harmonic part " + sci(min_h));
    o.detail << "trefoil 500 steps, min |h| " << sci(min_h) << " (" << sci(min_ratio) << " of |u|)";
  }
  // b1 = 0 sphere: harmonic series identically zero
  {
    const SurfaceMesh mesh = meshgen::icosphere(2);
    const HodgeContext ctx(mesh, 1);
    const HarmonicBasis basis = harmonic_basis(ctx);
    FlowConfig cfg;
    cfg.k = 1;
    cfg.mu = 0.05;
    cfg.dt = 0.01;
    cfg.t_end = 500 * cfg.dt;
    const Eigen::VectorXd F = assemble_load(ctx.V(), VectorFunction([](int, const Vec3& x) {
                                              // x cross grad(xy): free of rigid rotations
                                              return Vec3(-x.z() * x.x(), x.z() * x.y(), x.x() * x.x() - x.y() * x.y());
                                            }));
    const SimulationResult r = run_simulation(ctx, basis, cfg, [&](double) { return F; });
    double hmax = 0;
    for (const SeriesRow& row : r.series) hmax = std::max(hmax, row.harmonic_norm + row.h.size());
    o.require(r.series.size() == 501, "sphere steps");
    o.require(r.final_state.u.allFinite(), "sphere NaN");
    o.require(hmax == 0.0, "sphere harmonic series " + sci(hmax));
    o.require(r.final_state.kinetic_energy > 0, "sphere flow is zero");
    o.detail << "; sphere 500 steps, harmonic series " << sci(hmax);
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Betti dimensions of the harmonic basis", betti},
      {"dof counts of the genus-1 table", table_counts},
      {"orthogonality and structure suite", structure},
      {"reduced and saddle formulations agree", equivalence},
      {"pressure robustness", pressure_robustness},
      {"Schur elimination against monolithic solve", schur},
      {"viscous energy decay", energy},
      {"piecewise constant splitting on a flat patch", p0_completeness},
      {"coarse qualitative runs", qualitative},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::string detail = o.detail.str();
    if (!o.pass) detail += (detail.empty() ? "" : " | ") + ("failed: " + o.failures);
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
