// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "surfhodge/hodge.hpp"

namespace surfhodge {

/// Reduced system T^T A T x = T^T b for T = [E | H], split by the
/// (streamfunction, harmonic) ordering. A nonempty gauge vector g adds the
/// constraint g^T x_S = 0.
struct BlockSystem {
  SparseMatrix A_SS;
  Eigen::MatrixXd A_SH, A_HS, A_HH;
  Eigen::VectorXd b_S, b_H;
  Eigen::VectorXd gauge;

  int n_s() const { return static_cast<int>(A_SS.rows()); }
  int n_h() const { return static_cast<int>(A_HH.rows()); }
};

BlockSystem build_reduced_system(const SparseMatrix& A, const Eigen::VectorXd& b, const SparseMatrix& E,
                                 const Eigen::MatrixXd& H, const Eigen::VectorXd& gauge = {});

/// Schur complement elimination of the harmonic block. Construction costs
/// N_H sparse solves, every solve() one more.
class SchurSolver {
 public:
  explicit SchurSolver(const BlockSystem& sys);

  std::pair<Eigen::VectorXd, Eigen::VectorXd> solve(const Eigen::VectorXd& b_S, const Eigen::VectorXd& b_H) const;

  long sparse_solves() const { return op_.solve_count(); }
  const Eigen::MatrixXd& schur_complement() const { return S_HH_; }

 private:
  Eigen::VectorXd solve_sparse(const Eigen::VectorXd& rhs) const;

  int n_s_ = 0, n_h_ = 0;
  bool gauged_ = false;
  FactorizedOperator op_;
  Eigen::MatrixXd Z_;  // A_SS^{-1} A_SH
  Eigen::MatrixXd A_HS_;
  Eigen::MatrixXd S_HH_;
  Eigen::FullPivLU<Eigen::MatrixXd> schur_lu_;
};

struct SchurResult {
  Eigen::VectorXd x_S, x_H;
  long sparse_solves = 0;
};

SchurResult schur_solve(const BlockSystem& sys);

/// Oracle: the same block system assembled as one sparse matrix and solved
/// by LU.
std::pair<Eigen::VectorXd, Eigen::VectorXd> monolithic_solve(const BlockSystem& sys);

struct FlowConfig {
  int k = 1;
  double mu = 0.1;
  double alpha = 0.0;  // <= 0: default_penalty(k)
  double dt = 1e-3;
  double t_end = 1.0;
  WallCondition wall = WallCondition::NoSlip;
  bool allow_inviscid = false;
  int output_every = 10;
  std::uint64_t seed = 1;
  double kernel_tol = 1e-10;
  int dense_limit = 4000;  // largest reduced size for the dense kernel fallback
  double cfl = 0.5;
};

/// Throws NonpositiveParameter / ConfigError on invalid values.
void validate(const FlowConfig& config);
double penalty(const FlowConfig& config);

/// Viscous operator a_h on V for the configuration (zero for an allowed
/// inviscid run).
SparseMatrix viscous_operator(const HodgeContext& ctx, const FlowConfig& config);

struct FlowState {
  double t = 0.0;
  Eigen::VectorXd psi;  // S coefficients
  Eigen::VectorXd h;    // harmonic coefficients
  Eigen::VectorXd u;    // V coefficients, E psi + H h
  double kinetic_energy = 0.0;
};

FlowState make_state(const HodgeContext& ctx, const HarmonicBasis& basis, double t, Eigen::VectorXd psi,
                     Eigen::VectorXd h);

struct ReducedSolution {
  FlowState state;
  /// M-orthonormal kernel fields removed by the gauge (V coefficients)
  std::vector<Eigen::VectorXd> kernel;
  bool dense_fallback = false;
  long sparse_solves = 0;
};

/// a_h(u, v) = F(v) for all divergence-free v, solved in (psi, h).
/// If the reduced operator is singular on a closed surface, a kernel basis is
/// detected densely and the solution is made L2-orthogonal to it.
ReducedSolution solve_stokes_reduced(const HodgeContext& ctx, const HarmonicBasis& basis, const SparseMatrix& A,
                                     const Eigen::VectorXd& F, const FlowConfig& config = {});

struct SaddleSolution {
  Eigen::VectorXd u;  // V coefficients
  Eigen::VectorXd p;  // Q coefficients, zero mean
};

/// Full velocity-pressure system on V x Q with zero-mean pressure and
/// optional orthogonality against kernel fields.
SaddleSolution solve_stokes_saddle(const HodgeContext& ctx, const SparseMatrix& A, const Eigen::VectorXd& F,
                                   const std::vector<Eigen::VectorXd>& kernel = {});

/// Zero-mean pressure from the force residual F - A u through the mixed
/// projection.
Eigen::VectorXd reconstruct_pressure(const HodgeContext& ctx, const SparseMatrix& A, const Eigen::VectorXd& F,
                                     const Eigen::VectorXd& u);

/// Discrete gradient load v -> (div v, q).
Eigen::VectorXd gradient_load(const HodgeContext& ctx, const Eigen::VectorXd& q);

/// Max of |u| over triangle vertices and centroids.
double max_speed(const FeField& u);

/// Semi-implicit Euler: viscosity implicit, convection explicit.
class NavierStokesStepper {
 public:
  NavierStokesStepper(const HodgeContext& ctx, const HarmonicBasis& basis, const FlowConfig& config);

  /// Advances by dt with load F evaluated at the new time.
  FlowState step(const FlowState& state, const Eigen::VectorXd& F);

  /// 0.5 h_min / max|u| (infinite for u = 0).
  double cfl_limit(const Eigen::VectorXd& u) const;
  int cfl_warnings() const { return cfl_warnings_; }
  void set_warning_handler(std::function<void(const std::string&)> handler) { warn_ = std::move(handler); }

  const SparseMatrix& viscous() const { return A_; }
  long sparse_solves() const { return schur_->sparse_solves(); }

 private:
  const HodgeContext& ctx_;
  const HarmonicBasis& basis_;
  FlowConfig config_;
  SparseMatrix A_;
  Eigen::MatrixXd H_;
  double h_min_ = 0.0;
  std::unique_ptr<SchurSolver> schur_;
  int cfl_warnings_ = 0;
  std::function<void(const std::string&)> warn_;
};

/// Load vector of the forcing at time t.
using ForcingLoad = std::function<Eigen::VectorXd(double t)>;

struct SeriesRow {
  int step = 0;
  double t = 0.0;
  double kinetic_energy = 0.0;
  double harmonic_norm = 0.0;
  double rot_norm = 0.0;
  double div_norm = 0.0;
  Eigen::VectorXd h;
};

struct SimulationResult {
  std::vector<SeriesRow> series;
  std::vector<std::filesystem::path> files;
  FlowState final_state;
  int cfl_warnings = 0;
};

struct SimulationOptions {
  /// initial state; Stokes solution for the forcing at t = 0 if unset
  std::optional<FlowState> initial;
  /// directory for VTK snapshots and the CSV series; nothing written if empty
  std::filesystem::path out_dir;
  std::string prefix = "flow";
  std::function<void(const std::string&)> warn;
};

SimulationResult run_simulation(const HodgeContext& ctx, const HarmonicBasis& basis, const FlowConfig& config,
                                const ForcingLoad& forcing, const SimulationOptions& options = {});

/// Header of the time-series CSV.
std::string series_csv_header(int b1);
std::string series_csv_row(const SeriesRow& row);

}  // namespace surfhodge
