// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Core>

namespace surfhodge {

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Rule on the reference triangle {(xi, eta) : xi, eta >= 0, xi + eta <= 1}.
/// Weights sum to the reference area 1/2.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
  /// Barycentric coordinates (1 - xi - eta, xi, eta) of point i.
  Eigen::Vector3d barycentric(int i) const;
};

/// n-point Gauss-Legendre rule on [0, 1], exact for degree 2n - 1.
LineRule gauss_legendre(int n);
/// Smallest Gauss-Legendre rule exact for polynomials of the given degree.
LineRule line_rule(int degree);
/// Collapsed (Duffy) Gauss rule exact for polynomials of the given total degree.
QuadratureRule triangle_rule(int degree);

}  // namespace surfhodge
