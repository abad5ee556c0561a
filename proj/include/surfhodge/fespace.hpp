// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "surfhodge/mesh.hpp"
#include "surfhodge/quadrature.hpp"
#include "surfhodge/reference_element.hpp"

namespace surfhodge {

enum class Constraint { None, ZeroBoundaryTrace, ZeroMean, ZeroNormalTrace };

std::string_view to_string(Constraint c);

/// Affine map x = x0 + F (xi, eta) of a surface triangle.
struct ElementGeometry {
  Vec3 x0;
  Eigen::Matrix<double, 3, 2> F;
  Eigen::Matrix<double, 2, 3> F_pinv;  // (F^T F)^{-1} F^T
  double J = 0.0;                      // sqrt(det(F^T F)) = 2 * area
  Vec3 normal;

  Vec3 map(const Eigen::Vector2d& p) const { return x0 + F * p; }
  /// Tangential gradient of a scalar from its reference gradient.
  Vec3 gradient(const Eigen::Vector2d& ref_grad) const { return F_pinv.transpose() * ref_grad; }
  /// Contravariant Piola transform J^{-1} F v.
  Vec3 piola(const Eigen::Vector2d& v) const { return F * v / J; }
  /// Inverse Piola transform of a tangential vector.
  Eigen::Vector2d inverse_piola(const Vec3& v) const { return J * (F_pinv * v); }
};

ElementGeometry element_geometry(const SurfaceMesh& mesh, int t);

/// Contravariant Piola transform of a reference field sample on triangle t.
Vec3 piola_map(const SurfaceMesh& mesh, int t, const Eigen::Vector2d& reference_value);

/// Discrete function space on a mesh with a global dof map. The mesh must
/// outlive the space.
///
/// Global numbering: Lagrange uses vertices, then edge nodes ordered along the
/// edge tangent (lower to higher vertex), then interior nodes. BDM uses edge
/// moments then interior moments per triangle. Dofs removed by a constraint
/// are stored as -1 in the local-to-global map.
class FeSpace {
 public:
  FeSpace(const SurfaceMesh& mesh, SpaceKind kind, int degree, Constraint constraint);

  const SurfaceMesh& mesh() const { return *mesh_; }
  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  Constraint constraint() const { return constraint_; }
  bool is_vector() const { return kind_ == SpaceKind::BDM; }
  bool zero_mean() const { return constraint_ == Constraint::ZeroMean; }

  int num_dofs() const { return num_dofs_; }
  int num_local_dofs() const { return reference_->num_basis(); }
  std::span<const int> local_dofs(int t) const;
  std::span<const double> local_signs(int t) const;

  const ReferenceElement& reference() const { return *reference_; }
  bool same_mesh(const FeSpace& other) const { return mesh_ == other.mesh_; }

 private:
  const SurfaceMesh* mesh_;
  SpaceKind kind_;
  int degree_;
  Constraint constraint_;
  std::shared_ptr<const ReferenceElement> reference_;
  int num_dofs_ = 0;
  std::vector<int> dofs_;
  std::vector<double> signs_;
};

FeSpace build_space(const SurfaceMesh& mesh, SpaceKind kind, int degree, Constraint constraint = Constraint::None);

struct DofCount {
  int total = 0;      // dimension of the space with removed dofs eliminated
  int effective = 0;  // additionally minus one for a zero-mean constraint
};

DofCount count_dofs(const TopologySummary& topology, SpaceKind kind, int degree, Constraint constraint);

/// Coefficient vector attached to a space.
class FeField {
 public:
  explicit FeField(const FeSpace& space);
  FeField(const FeSpace& space, Eigen::VectorXd coeffs);

  const FeSpace& space() const { return *space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

 private:
  const FeSpace* space_;
  Eigen::VectorXd coeffs_;
};

/// Basis values on one triangle in physical form, orientation signs applied.
struct BasisEvaluation {
  // scalar spaces
  Eigen::MatrixXd values;             // points x dofs
  std::vector<Eigen::Matrix3Xd> gradients;  // per point, 3 x dofs
  // vector spaces
  std::vector<Eigen::Matrix3Xd> vectors;    // per point, 3 x dofs
  Eigen::MatrixXd divergence;         // points x dofs
};

BasisEvaluation eval_basis(const FeSpace& space, int t, const std::vector<Eigen::Vector3d>& barycentric);

/// Scalar field value / vector field value at reference point p of triangle t.
double evaluate_scalar(const FeField& f, int t, const Eigen::Vector2d& p);
Vec3 evaluate_scalar_gradient(const FeField& f, int t, const Eigen::Vector2d& p);
Vec3 evaluate_vector(const FeField& f, int t, const Eigen::Vector2d& p);
double evaluate_divergence(const FeField& f, int t, const Eigen::Vector2d& p);

using ScalarFunction = std::function<double(int triangle, const Vec3& x)>;
using VectorFunction = std::function<Vec3(int triangle, const Vec3& x)>;

/// Canonical interpolant: nodal values for scalar spaces, edge and interior
/// moments for BDM. Shared dofs are taken from the owning triangle (tri[0]).
FeField interpolate(const FeSpace& space, const ScalarFunction& f);
FeField interpolate(const FeSpace& space, const VectorFunction& v);

}  // namespace surfhodge
