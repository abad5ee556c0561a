// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/reference_element.hpp"

#include <cmath>

#include <Eigen/LU>

#include "surfhodge/error.hpp"
#include "surfhodge/quadrature.hpp"

namespace surfhodge {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Lagrange: return "Lagrange";
    case SpaceKind::BDM: return "BDM";
    case SpaceKind::DGPressure: return "DGPressure";
    case SpaceKind::CrouzeixRaviart: return "CrouzeixRaviart";
    case SpaceKind::FacetTangential: return "FacetTangential";
  }
  return "Unknown";
}

int num_monomials(int degree) {
  return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2;
}

Eigen::VectorXd monomials(int degree, const Eigen::Vector2d& p) {
  Eigen::VectorXd m(num_monomials(degree));
  int idx = 0;
  for (int s = 0; s <= degree; ++s)
    for (int b = 0; b <= s; ++b) m(idx++) = std::pow(p.x(), s - b) * std::pow(p.y(), b);
  return m;
}

Eigen::MatrixX2d monomial_gradients(int degree, const Eigen::Vector2d& p) {
  Eigen::MatrixX2d g(num_monomials(degree), 2);
  int idx = 0;
  for (int s = 0; s <= degree; ++s)
    for (int b = 0; b <= s; ++b) {
      const int a = s - b;
      g(idx, 0) = a > 0 ? a * std::pow(p.x(), a - 1) * std::pow(p.y(), b) : 0.0;
      g(idx, 1) = b > 0 ? b * std::pow(p.x(), a) * std::pow(p.y(), b - 1) : 0.0;
      ++idx;
    }
  return g;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double ipow(double x, int n) { return n <= 0 ? 1.0 : std::pow(x, n); }

}  // namespace

Eigen::VectorXd bernstein(int degree, const Eigen::Vector2d& p) {
  const double l[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
  Eigen::VectorXd out(num_monomials(degree));
  int idx = 0;
  for (int s = 0; s <= degree; ++s)
    for (int c = 0; c <= s; ++c) {
      const int b = s - c, a = degree - s;
      out(idx++) = factorial(degree) / (factorial(a) * factorial(b) * factorial(c)) * ipow(l[0], a) * ipow(l[1], b) *
                   ipow(l[2], c);
    }
  return out;
}

Eigen::MatrixX2d bernstein_gradients(int degree, const Eigen::Vector2d& p) {
  const double l[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
  Eigen::MatrixX2d out(num_monomials(degree), 2);
  int idx = 0;
  for (int s = 0; s <= degree; ++s)
    for (int c = 0; c <= s; ++c) {
      const int b = s - c, a = degree - s;
      const double coef = factorial(degree) / (factorial(a) * factorial(b) * factorial(c));
      const double d0 = a > 0 ? a * ipow(l[0], a - 1) * ipow(l[1], b) * ipow(l[2], c) : 0.0;
      const double d1 = b > 0 ? b * ipow(l[0], a) * ipow(l[1], b - 1) * ipow(l[2], c) : 0.0;
      const double d2 = c > 0 ? c * ipow(l[0], a) * ipow(l[1], b) * ipow(l[2], c - 1) : 0.0;
      out(idx, 0) = coef * (d1 - d0);
      out(idx, 1) = coef * (d2 - d0);
      ++idx;
    }
  return out;
}

Eigen::Vector2d reference_vertex(int v) {
  switch (v) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

Eigen::Vector2d reference_edge_point(int edge, double s) {
  const Eigen::Vector2d a = reference_vertex((edge + 1) % 3);
  const Eigen::Vector2d b = reference_vertex((edge + 2) % 3);
  return a + s * (b - a);
}

Eigen::Vector2d reference_edge_normal(int edge) {
  const Eigen::Vector2d d = reference_vertex((edge + 2) % 3) - reference_vertex((edge + 1) % 3);
  return {d.y(), -d.x()};
}

ReferenceElement::ReferenceElement(SpaceKind kind, int degree) : kind_(kind), degree_(degree) {
  switch (kind) {
    case SpaceKind::Lagrange:
      if (degree < 1) throw Error(Errc::UnsupportedCombination, "Lagrange needs degree >= 1");
      build_lagrange();
      break;
    case SpaceKind::DGPressure:
      if (degree < 0) throw Error(Errc::UnsupportedCombination, "negative degree");
      build_lagrange();
      break;
    case SpaceKind::BDM:
      if (degree < 0) throw Error(Errc::UnsupportedCombination, "negative degree");
      build_bdm();
      break;
    case SpaceKind::CrouzeixRaviart:
      if (degree != 1) throw Error(Errc::UnsupportedCombination, "Crouzeix-Raviart is only available for degree 1");
      build_crouzeix_raviart();
      break;
    case SpaceKind::FacetTangential:
      if (degree < 0) throw Error(Errc::UnsupportedCombination, "negative degree");
      per_edge_ = degree + 1;
      num_basis_ = 3 * per_edge_;
      break;
  }
}

void ReferenceElement::build_lagrange() {
  const int p = degree_;
  poly_degree_ = p;
  if (p == 0) {
    nodes_ = {Eigen::Vector2d(1.0 / 3.0, 1.0 / 3.0)};
  } else {
    for (int v = 0; v < 3; ++v) nodes_.push_back(reference_vertex(v));
    for (int e = 0; e < 3; ++e)
      for (int j = 1; j < p; ++j) nodes_.push_back(reference_edge_point(e, double(j) / p));
    for (int b = 1; b < p; ++b)
      for (int a = 1; a + b < p; ++a) nodes_.emplace_back(double(a) / p, double(b) / p);
  }
  num_basis_ = static_cast<int>(nodes_.size());
  Eigen::MatrixXd vandermonde(num_basis_, num_monomials(p));
  for (int i = 0; i < num_basis_; ++i) vandermonde.row(i) = bernstein(p, nodes_[i]).transpose();
  coeffs_ = vandermonde.inverse();
  if (kind_ == SpaceKind::DGPressure) {
    per_interior_ = num_basis_;
  } else {
    per_vertex_ = 1;
    per_edge_ = p - 1;
    per_interior_ = (p - 1) * (p - 2) / 2;
  }
}

void ReferenceElement::build_crouzeix_raviart() {
  poly_degree_ = 1;
  num_basis_ = 3;
  per_edge_ = 1;
  // 1 - 2 lambda_i over (lambda_0, lambda_1, lambda_2)
  coeffs_ = Eigen::MatrixXd::Ones(3, 3) - 2.0 * Eigen::MatrixXd::Identity(3, 3);
  for (int e = 0; e < 3; ++e) nodes_.push_back(reference_edge_point(e, 0.5));
}

void ReferenceElement::build_bdm() {
  const int k = degree_;
  per_edge_ = k + 1;
  per_interior_ = k >= 1 ? (k + 1) * (k - 1) : 0;
  num_basis_ = 3 * per_edge_ + per_interior_;
  poly_degree_ = std::max(k, 1);
  const int nm = num_monomials(poly_degree_);

  // Raw spanning set as columns over (x-polynomials, y-polynomials).
  Eigen::MatrixXd raw;
  if (k == 0) {
    // (1, 0), (0, 1), (xi, eta) with 1 = lambda_0 + lambda_1 + lambda_2
    raw = Eigen::MatrixXd::Zero(2 * nm, 3);
    raw.col(0).head(3).setOnes();
    raw.col(1).tail(3).setOnes();
    raw(1, 2) = 1.0;
    raw(nm + 2, 2) = 1.0;
  } else {
    raw = Eigen::MatrixXd::Identity(2 * nm, 2 * nm);
  }

  const int deg = poly_degree_;
  Eigen::MatrixXd dof_matrix(num_basis_, num_basis_);
  for (int r = 0; r < num_basis_; ++r) {
    const Eigen::VectorXd cx = raw.col(r).head(nm);
    const Eigen::VectorXd cy = raw.col(r).tail(nm);
    dof_matrix.col(r) = apply_vector_dofs([&](const Eigen::Vector2d& p) {
      const Eigen::VectorXd m = bernstein(deg, p);
      return Eigen::Vector2d(cx.dot(m), cy.dot(m));
    });
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dof_matrix);
  if (lu.rank() != num_basis_) throw Error(Errc::SingularMatrix, "BDM degrees of freedom are not unisolvent");
  const Eigen::MatrixXd c = raw * lu.inverse();
  coeffs_x_ = c.topRows(nm);
  coeffs_y_ = c.bottomRows(nm);
}

Eigen::VectorXd ReferenceElement::values(const Eigen::Vector2d& p) const {
  return coeffs_.transpose() * bernstein(poly_degree_, p);
}

Eigen::Matrix2Xd ReferenceElement::gradients(const Eigen::Vector2d& p) const {
  return (coeffs_.transpose() * bernstein_gradients(poly_degree_, p)).transpose();
}

Eigen::Matrix2Xd ReferenceElement::vector_values(const Eigen::Vector2d& p) const {
  const Eigen::VectorXd m = bernstein(poly_degree_, p);
  Eigen::Matrix2Xd v(2, num_basis_);
  v.row(0) = (coeffs_x_.transpose() * m).transpose();
  v.row(1) = (coeffs_y_.transpose() * m).transpose();
  return v;
}

Eigen::VectorXd ReferenceElement::divergences(const Eigen::Vector2d& p) const {
  const Eigen::MatrixX2d g = bernstein_gradients(poly_degree_, p);
  return coeffs_x_.transpose() * g.col(0) + coeffs_y_.transpose() * g.col(1);
}

std::array<Eigen::Matrix2Xd, 2> ReferenceElement::vector_derivatives(const Eigen::Vector2d& p) const {
  const Eigen::MatrixX2d g = bernstein_gradients(poly_degree_, p);
  std::array<Eigen::Matrix2Xd, 2> d;
  for (int dir = 0; dir < 2; ++dir) {
    d[dir].resize(2, num_basis_);
    d[dir].row(0) = (coeffs_x_.transpose() * g.col(dir)).transpose();
    d[dir].row(1) = (coeffs_y_.transpose() * g.col(dir)).transpose();
  }
  return d;
}

Eigen::VectorXd ReferenceElement::apply_dofs(const std::function<double(const Eigen::Vector2d&)>& f) const {
  if (is_vector() || nodes_.empty())
    throw Error(Errc::UnsupportedCombination, "scalar dofs requested from a non-nodal element");
  Eigen::VectorXd out(num_basis_);
  for (int i = 0; i < num_basis_; ++i) out(i) = f(nodes_[i]);
  return out;
}

Eigen::VectorXd ReferenceElement::apply_vector_dofs(
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& v) const {
  if (!is_vector()) throw Error(Errc::UnsupportedCombination, "vector dofs requested from a scalar element");
  const int k = degree_;
  Eigen::VectorXd out(num_basis_);
  const LineRule line = line_rule(2 * k + 4);
  int idx = 0;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d normal = reference_edge_normal(e);
    for (int j = 0; j <= k; ++j) {
      double acc = 0.0;
      for (int q = 0; q < line.size(); ++q) {
        const double s = line.points[q];
        acc += line.weights[q] * v(reference_edge_point(e, s)).dot(normal) * std::legendre(j, 2.0 * s - 1.0);
      }
      out(idx++) = acc;
    }
  }
  if (k >= 1) {
    const QuadratureRule rule = triangle_rule(2 * k + 4);
    const int n_grad = num_monomials(k - 1) - 1;
    const int n_rot = num_monomials(k - 2);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_grad + n_rot);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d& p = rule.points[q];
      const Eigen::Vector2d vq = v(p);
      const Eigen::MatrixX2d g = monomial_gradients(k - 1, p);
      for (int m = 0; m < n_grad; ++m) acc(m) += rule.weights[q] * vq.dot(g.row(m + 1).transpose());
      if (n_rot > 0) {
        const double xi = p.x(), eta = p.y();
        const double bubble = xi * eta * (1.0 - xi - eta);
        const Eigen::Vector2d grad_bubble(eta * (1.0 - 2.0 * xi - eta), xi * (1.0 - xi - 2.0 * eta));
        const Eigen::VectorXd mq = monomials(k - 2, p);
        const Eigen::MatrixX2d gq = monomial_gradients(k - 2, p);
        for (int m = 0; m < n_rot; ++m) {
          const Eigen::Vector2d grad = mq(m) * grad_bubble + bubble * gq.row(m).transpose();
          acc(n_grad + m) += rule.weights[q] * vq.dot(Eigen::Vector2d(grad.y(), -grad.x()));
        }
      }
    }
    out.tail(n_grad + n_rot) = acc;
  }
  return out;
}

std::shared_ptr<const ReferenceElement> make_reference_element(SpaceKind kind, int degree) {
  return std::make_shared<const ReferenceElement>(kind, degree);
}

}  // namespace surfhodge
