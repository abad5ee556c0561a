// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "surfhodge/assembly.hpp"
#include "surfhodge/fespace.hpp"
#include "surfhodge/linalg.hpp"

namespace surfhodge {

/// Spaces and operators of the discrete complex at degree k on one mesh:
///   S = Lagrange(k+1) with zero mean (closed) or zero trace (bordered),
///   V = BDM(k) with zero normal trace, Q = DG(max(k-1, 0)).
/// Factorizations are built on first use. The mesh must outlive the context;
/// the context itself is pinned in memory because fields point into it.
class HodgeContext {
 public:
  HodgeContext(const SurfaceMesh& mesh, int k);
  HodgeContext(const HodgeContext&) = delete;
  HodgeContext& operator=(const HodgeContext&) = delete;

  const SurfaceMesh& mesh() const { return *mesh_; }
  int k() const { return k_; }
  const TopologySummary& topology() const { return topo_; }
  bool closed() const { return topo_.closed(); }

  const FeSpace& S() const { return S_; }
  const FeSpace& V() const { return V_; }
  const FeSpace& Q() const { return Q_; }

  const SparseMatrix& mass() const { return M_; }       // V mass
  const SparseMatrix& embedding() const { return E_; }  // rot: S -> V
  const SparseMatrix& div() const { return B_; }        // V -> Q
  const SparseMatrix& rot_laplacian() const { return K_; }  // E^T M E
  const SparseMatrix& pressure_mass() const { return MQ_; }
  const Eigen::VectorXd& s_mean() const { return s_mean_; }
  const Eigen::VectorXd& q_mean() const { return q_mean_; }

  /// Solves (rot psi, rot phi) = rhs(phi) with the S gauge.
  Eigen::VectorXd solve_streamfunction(const Eigen::VectorXd& rhs) const;
  /// Mixed projection solve: returns (u, lambda) for load vector g.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_mixed(const Eigen::VectorXd& g) const;

  const FactorizedOperator& streamfunction_solver() const;
  const FactorizedOperator& mixed_solver() const;

  /// [[A, B^T, 0], [B, 0, q_mean], [0, q_mean^T, 0]].
  SparseMatrix saddle_matrix(const SparseMatrix& A) const;

 private:
  const SurfaceMesh* mesh_;
  int k_;
  TopologySummary topo_;
  FeSpace S_, V_, Q_;
  SparseMatrix M_, E_, B_, K_, MQ_;
  Eigen::VectorXd s_mean_, q_mean_;
  mutable std::unique_ptr<FactorizedOperator> k_solver_;
  mutable std::unique_ptr<FactorizedOperator> mixed_solver_;
};

struct HelmholtzResult {
  Eigen::VectorXd u;       // V coefficients of the divergence-free part
  Eigen::VectorXd lambda;  // Q coefficients of the multiplier
};

/// L2 projection onto the discretely divergence-free subspace of V.
HelmholtzResult helmholtz_project(const HodgeContext& ctx, const FeField& r);
/// Same, from the load vector g_i = (r, v_i).
HelmholtzResult helmholtz_project_load(const HodgeContext& ctx, const Eigen::VectorXd& g);

struct HarmonicBasis {
  int k = 0;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int b1 = 0;
  int num_dofs = 0;
  std::uint64_t mesh_checksum = 0;
  std::vector<Eigen::VectorXd> fields;  // V coefficients, L2-orthonormal
  int attempts = 0;

  int size() const { return static_cast<int>(fields.size()); }
  /// N x b1 matrix with the fields as columns.
  Eigen::MatrixXd matrix() const;
};

struct HarmonicOptions {
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int max_attempts = -1;  // -1: 20 b1 + 20
};

/// Randomized construction of an orthonormal basis of discrete harmonic
/// fields: project random samples onto the divergence-free subspace, remove
/// the streamfunction part, orthogonalize and keep what survives.
HarmonicBasis harmonic_basis(const HodgeContext& ctx, const HarmonicOptions& options = {});

/// Throws BasisMismatch if the basis was not built for this context.
void check_basis(const HodgeContext& ctx, const HarmonicBasis& basis);

void write_basis(std::ostream& out, const HarmonicBasis& basis);
HarmonicBasis read_basis(std::istream& in);
void save_basis(const std::filesystem::path& path, const HarmonicBasis& basis);
HarmonicBasis load_basis(const std::filesystem::path& path);

struct HodgeComponents {
  Eigen::VectorXd psi;        // S coefficients
  Eigen::VectorXd h;          // harmonic coefficients
  Eigen::VectorXd lambda;     // Q coefficients
  Eigen::VectorXd rot_part;   // V coefficients of rot(psi)
  Eigen::VectorXd harmonic_part;
  Eigen::VectorXd gradient_part;  // div* lambda
  double residual_norm = 0.0;
};

/// Three-way split v = rot(psi) + sum h_i H_i + div* lambda.
HodgeComponents decompose(const HodgeContext& ctx, const HarmonicBasis& basis, const FeField& v);

struct P0Decomposition {
  Eigen::VectorXd psi;  // Lagrange(1) coefficients, same gauge as the context
  Eigen::VectorXd h;
  Eigen::VectorXd phi;  // Crouzeix-Raviart coefficients, zero mean
  std::vector<Vec3> rot_part, harmonic_part, gradient_part, remainder;
  double remainder_norm = 0.0;
};

/// Splitting of a piecewise constant tangential field into rot(S1),
/// the piecewise constant parts of the k = 0 harmonic fields, and broken
/// gradients of Crouzeix-Raviart functions. Requires a k = 0 context.
P0Decomposition decompose_p0_incomplete(const HodgeContext& ctx, const HarmonicBasis& basis,
                                        const std::vector<Vec3>& v);

/// Piecewise constant L2 norm.
double p0_norm(const SurfaceMesh& mesh, const std::vector<Vec3>& v);
double p0_inner(const SurfaceMesh& mesh, const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct DimensionReport {
  int k = 0;
  int dim_divergence_free = 0;
  int dim_rot = 0;
  int difference = 0;
  int b1 = 0;
  bool ok() const { return difference == b1; }
};

/// Dimension count of the divergence-free subspace against rot(S) from
/// counts alone.
DimensionReport verify_dimension(const TopologySummary& topology, int k);

}  // namespace surfhodge
