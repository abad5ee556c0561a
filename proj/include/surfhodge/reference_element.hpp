// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string_view>

#include <Eigen/Dense>

namespace surfhodge {

enum class SpaceKind { Lagrange, BDM, DGPressure, CrouzeixRaviart, FacetTangential };

std::string_view to_string(SpaceKind kind);

/// Monomials xi^a eta^b with a + b <= degree, ordered by total degree and then
/// by increasing power of eta.
int num_monomials(int degree);
Eigen::VectorXd monomials(int degree, const Eigen::Vector2d& p);
/// Row m holds (d/dxi, d/deta) of monomial m.
Eigen::MatrixX2d monomial_gradients(int degree, const Eigen::Vector2d& p);

/// Bernstein polynomials of the given degree in the barycentric coordinates
/// (1 - xi - eta, xi, eta); same count as the monomials of that degree.
Eigen::VectorXd bernstein(int degree, const Eigen::Vector2d& p);
Eigen::MatrixX2d bernstein_gradients(int degree, const Eigen::Vector2d& p);

/// Reference point of local edge i at parameter s in [0, 1]; the edge runs
/// from vertex (i+1)%3 to vertex (i+2)%3.
Eigen::Vector2d reference_edge_point(int edge, double s);
/// Outward normal of local reference edge i scaled by the edge length.
Eigen::Vector2d reference_edge_normal(int edge);
Eigen::Vector2d reference_vertex(int v);

/// Basis functions on the reference triangle, stored as coefficients over
/// the Bernstein polynomials. Scalar elements use `coeffs`; vector elements use `coeffs_x`
/// and `coeffs_y` for the two components.
///
/// Local dof order is: vertex dofs, then edge dofs (edge-major, along the
/// local edge direction), then interior dofs.
class ReferenceElement {
 public:
  ReferenceElement(SpaceKind kind, int degree);

  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  bool is_vector() const { return kind_ == SpaceKind::BDM; }
  int num_basis() const { return num_basis_; }
  int dofs_per_vertex() const { return per_vertex_; }
  int dofs_per_edge() const { return per_edge_; }
  int dofs_per_interior() const { return per_interior_; }
  /// Degree of the Bernstein basis the coefficients refer to.
  int polynomial_degree() const { return poly_degree_; }

  Eigen::VectorXd values(const Eigen::Vector2d& p) const;
  Eigen::Matrix2Xd gradients(const Eigen::Vector2d& p) const;

  Eigen::Matrix2Xd vector_values(const Eigen::Vector2d& p) const;
  Eigen::VectorXd divergences(const Eigen::Vector2d& p) const;
  /// {d/dxi, d/deta} of every vector basis function, each 2 x n.
  std::array<Eigen::Matrix2Xd, 2> vector_derivatives(const Eigen::Vector2d& p) const;

  /// Local degrees of freedom of a reference field (before orientation signs).
  Eigen::VectorXd apply_dofs(const std::function<double(const Eigen::Vector2d&)>& f) const;
  Eigen::VectorXd apply_vector_dofs(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& v) const;

  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  const Eigen::MatrixXd& coeffs_x() const { return coeffs_x_; }
  const Eigen::MatrixXd& coeffs_y() const { return coeffs_y_; }
  /// Nodes of nodal (Lagrange / DG) elements in reference coordinates.
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

 private:
  void build_lagrange();
  void build_bdm();
  void build_crouzeix_raviart();

  SpaceKind kind_;
  int degree_;
  int poly_degree_ = 0;
  int num_basis_ = 0;
  int per_vertex_ = 0;
  int per_edge_ = 0;
  int per_interior_ = 0;
  Eigen::MatrixXd coeffs_;
  Eigen::MatrixXd coeffs_x_;
  Eigen::MatrixXd coeffs_y_;
  std::vector<Eigen::Vector2d> nodes_;
};

std::shared_ptr<const ReferenceElement> make_reference_element(SpaceKind kind, int degree);

}  // namespace surfhodge
