// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "surfhodge/error.hpp"

namespace surfhodge {

Eigen::Vector3d QuadratureRule::barycentric(int i) const {
  return {1.0 - points[i].x() - points[i].y(), points[i].x(), points[i].y()};
}

LineRule gauss_legendre(int n) {
  if (n < 1) throw Error(Errc::NonpositiveParameter, "Gauss-Legendre rule needs at least one point");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  LineRule rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.points.push_back(0.5 * (eig.eigenvalues()(i) + 1.0));
    rule.weights.push_back(v0 * v0);  // 2 v0^2 on [-1, 1], halved for [0, 1]
  }
  return rule;
}

LineRule line_rule(int degree) {
  return gauss_legendre(std::max(1, (degree + 2) / 2));
}

QuadratureRule triangle_rule(int degree) {
  degree = std::max(degree, 0);
  // xi = u, eta = v (1 - u); the Jacobian (1 - u) adds one degree in u.
  const LineRule gu = line_rule(degree + 1);
  const LineRule gv = line_rule(degree);
  QuadratureRule rule;
  rule.exactness_degree = degree;
  for (int i = 0; i < gu.size(); ++i)
    for (int j = 0; j < gv.size(); ++j) {
      const double u = gu.points[i], v = gv.points[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  return rule;
}

}  // namespace surfhodge
