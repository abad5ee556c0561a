// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "surfhodge/error.hpp"

namespace surfhodge {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::VectorXd sign_vector(const FeSpace& space, int t) {
  const auto s = space.local_signs(t);
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& trip) {
  SparseMatrix A(rows, cols);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

void scatter(Triplets& trip, std::span<const int> rows, std::span<const int> cols, const Eigen::MatrixXd& local) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0) continue;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j] >= 0 && local(i, j) != 0.0) trip.emplace_back(rows[i], cols[j], local(i, j));
  }
}

void require_bdm(const FeSpace& V) {
  if (V.kind() != SpaceKind::BDM) throw Error(Errc::UnsupportedCombination, "a BDM space is required");
}

// Physical values (3 x n, signs applied) of a vector space at reference point p.
Eigen::Matrix3Xd physical_vectors(const FeSpace& V, const ElementGeometry& g, const Eigen::VectorXd& signs,
                                  const Eigen::Vector2d& p) {
  return (g.F * V.reference().vector_values(p) / g.J) * signs.asDiagonal();
}

// Ambient gradients of every basis function (3 x 3 each) at reference point p.
std::vector<Eigen::Matrix3d> physical_vector_gradients(const FeSpace& V, const ElementGeometry& g,
                                                       const Eigen::VectorXd& signs, const Eigen::Vector2d& p) {
  const auto d = V.reference().vector_derivatives(p);
  std::vector<Eigen::Matrix3d> out(signs.size());
  for (int b = 0; b < signs.size(); ++b) {
    Eigen::Matrix2d D;
    D.col(0) = d[0].col(b);
    D.col(1) = d[1].col(b);
    out[b] = signs(b) * g.F * D * g.F_pinv / g.J;
  }
  return out;
}

int triangle_quadrature_degree(const FeSpace& V) {
  const int k = V.reference().polynomial_degree();
  return std::max(2 * k + 3, 3 * k + 2);
}

int edge_quadrature_degree(const FeSpace& V) {
  const int k = V.reference().polynomial_degree();
  return std::max(2 * k + 2, 3 * k + 2);
}

// Reference point on triangle t for the global edge parameter s (along tau).
Eigen::Vector2d edge_reference_point(const SurfaceMesh& mesh, int t, int local, double s) {
  const double sl = mesh.edge_direction(t, local) > 0 ? s : 1.0 - s;
  return reference_edge_point(local, sl);
}

}  // namespace

SparseMatrix assemble_mass(const FeSpace& space) {
  if (space.kind() == SpaceKind::FacetTangential)
    throw Error(Errc::UnsupportedCombination, "facet space supports dof counting only");
  const SurfaceMesh& mesh = space.mesh();
  const ReferenceElement& ref = space.reference();
  const QuadratureRule rule = triangle_rule(2 * ref.polynomial_degree());
  const int n = ref.num_basis();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * n * n);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd signs = sign_vector(space, t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    if (space.is_vector()) {
      const Eigen::Matrix2d metric = g.F.transpose() * g.F;
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::Matrix2Xd v = ref.vector_values(rule.points[q]) * signs.asDiagonal();
        local += rule.weights[q] / g.J * v.transpose() * metric * v;
      }
    } else {
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = ref.values(rule.points[q]);
        local += rule.weights[q] * g.J * v * v.transpose();
      }
    }
    const auto dofs = space.local_dofs(t);
    scatter(trip, dofs, dofs, local);
  }
  return from_triplets(space.num_dofs(), space.num_dofs(), trip);
}

SparseMatrix assemble_stiffness(const FeSpace& S) {
  if (S.is_vector() || S.kind() == SpaceKind::FacetTangential)
    throw Error(Errc::UnsupportedCombination, "stiffness needs a scalar space");
  const SurfaceMesh& mesh = S.mesh();
  const ReferenceElement& ref = S.reference();
  const QuadratureRule rule = triangle_rule(std::max(2 * ref.polynomial_degree() - 2, 0));
  const int n = ref.num_basis();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * n * n);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::Matrix2d metric_inv = (g.F.transpose() * g.F).inverse();
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix2Xd d = ref.gradients(rule.points[q]);
      local += rule.weights[q] * g.J * d.transpose() * metric_inv * d;
    }
    const auto dofs = S.local_dofs(t);
    scatter(trip, dofs, dofs, local);
  }
  return from_triplets(S.num_dofs(), S.num_dofs(), trip);
}

SparseMatrix assemble_rot_embedding(const FeSpace& S, const FeSpace& V) {
  require_bdm(V);
  if (S.kind() != SpaceKind::Lagrange || S.degree() != V.degree() + 1)
    throw Error(Errc::DegreeMismatch, "rot embedding needs Lagrange(k+1) and BDM(k)");
  if (!S.same_mesh(V)) throw Error(Errc::DimensionMismatch, "spaces live on different meshes");
  const SurfaceMesh& mesh = V.mesh();
  const ReferenceElement& rs = S.reference();
  const ReferenceElement& rv = V.reference();
  // rot(phi) = J^{-1} F rot_hat(phi_hat), so the local dof values are purely referential.
  Eigen::MatrixXd local(rv.num_basis(), rs.num_basis());
  for (int a = 0; a < rs.num_basis(); ++a)
    local.col(a) = rv.apply_vector_dofs([&](const Eigen::Vector2d& p) {
      const Eigen::Vector2d grad = rs.gradients(p).col(a);
      return Eigen::Vector2d(grad.y(), -grad.x());
    });
  const int per_edge = rv.dofs_per_edge();
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto vdofs = V.local_dofs(t);
    const auto vsigns = V.local_signs(t);
    const auto sdofs = S.local_dofs(t);
    for (int i = 0; i < rv.num_basis(); ++i) {
      if (vdofs[i] < 0) continue;
      if (i < 3 * per_edge && mesh.edge(mesh.triangle_edge(t, i / per_edge)).tri[0] != t) continue;
      for (int a = 0; a < rs.num_basis(); ++a) {
        const double val = vsigns[i] * local(i, a);
        if (sdofs[a] >= 0 && std::abs(val) > 1e-14) trip.emplace_back(vdofs[i], sdofs[a], val);
      }
    }
  }
  return from_triplets(V.num_dofs(), S.num_dofs(), trip);
}

SparseMatrix assemble_div(const FeSpace& V, const FeSpace& Q) {
  require_bdm(V);
  if (Q.kind() != SpaceKind::DGPressure || Q.degree() != std::max(V.degree() - 1, 0))
    throw Error(Errc::DegreeMismatch, "divergence pairing needs DGPressure(max(k-1, 0)) for BDM(k)");
  if (!Q.same_mesh(V)) throw Error(Errc::DimensionMismatch, "spaces live on different meshes");
  const SurfaceMesh& mesh = V.mesh();
  const ReferenceElement& rv = V.reference();
  const ReferenceElement& rq = Q.reference();
  const QuadratureRule rule = triangle_rule(rv.polynomial_degree() + rq.polynomial_degree());
  // (div v, q)_T = integral over the reference triangle of div_hat(v_hat) q_hat
  Eigen::MatrixXd ref_local = Eigen::MatrixXd::Zero(rq.num_basis(), rv.num_basis());
  for (int q = 0; q < rule.size(); ++q)
    ref_local += rule.weights[q] * rq.values(rule.points[q]) * rv.divergences(rule.points[q]).transpose();
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::MatrixXd local = ref_local * sign_vector(V, t).asDiagonal();
    scatter(trip, Q.local_dofs(t), V.local_dofs(t), local);
  }
  return from_triplets(Q.num_dofs(), V.num_dofs(), trip);
}

double default_penalty(int k) {
  return 4.0 * (k + 1) * (k + 1);
}

SparseMatrix assemble_sip(const FeSpace& V, double mu, double alpha, WallCondition wall) {
  require_bdm(V);
  if (!(mu > 0.0) || !(alpha > 0.0)) throw Error(Errc::NonpositiveParameter, "SIP needs mu > 0 and alpha > 0");
  const SurfaceMesh& mesh = V.mesh();
  const int n = V.num_local_dofs();
  Triplets trip;

  const QuadratureRule rule = triangle_rule(2 * V.reference().polynomial_degree());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd signs = sign_vector(V, t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q < rule.size(); ++q) {
      const auto grads = physical_vector_gradients(V, g, signs, rule.points[q]);
      std::vector<Eigen::Matrix3d> eps(n);
      for (int b = 0; b < n; ++b) eps[b] = 0.5 * (grads[b] + grads[b].transpose());
      const double w = rule.weights[q] * g.J * mu;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const double v = w * (eps[i].cwiseProduct(eps[j])).sum();
          local(i, j) += v;
          if (j != i) local(j, i) += v;
        }
    }
    const auto dofs = V.local_dofs(t);
    scatter(trip, dofs, dofs, local);
  }

  const LineRule line = line_rule(edge_quadrature_degree(V));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.is_boundary() && wall == WallCondition::FreeSlip) continue;
    const EdgeFrame frame = edge_frames(mesh, e);
    const double len = mesh.edge_length(e);
    const int sides = edge.is_boundary() ? 1 : 2;
    std::vector<int> dofs;
    for (int s = 0; s < sides; ++s) {
      const auto d = V.local_dofs(edge.tri[s]);
      dofs.insert(dofs.end(), d.begin(), d.end());
    }
    const int m = sides * n;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    std::array<ElementGeometry, 2> geo;
    std::array<Eigen::VectorXd, 2> signs;
    for (int s = 0; s < sides; ++s) {
      geo[s] = element_geometry(mesh, edge.tri[s]);
      signs[s] = sign_vector(V, edge.tri[s]);
    }
    for (int q = 0; q < line.size(); ++q) {
      Eigen::VectorXd jump = Eigen::VectorXd::Zero(m);
      Eigen::VectorXd flux = Eigen::VectorXd::Zero(m);
      for (int s = 0; s < sides; ++s) {
        const Eigen::Vector2d p = edge_reference_point(mesh, edge.tri[s], edge.local[s], line.points[q]);
        const Eigen::Matrix3Xd vals = physical_vectors(V, geo[s], signs[s], p);
        const auto grads = physical_vector_gradients(V, geo[s], signs[s], p);
        const Vec3 nu = s == 0 ? frame.nu1 : *frame.nu2;
        const double side = s == 0 ? 1.0 : -1.0;
        const double weight = sides == 2 ? 0.5 : 1.0;
        for (int b = 0; b < n; ++b) {
          jump(s * n + b) = side * vals.col(b).dot(frame.tau);
          const Eigen::Matrix3d eps = 0.5 * (grads[b] + grads[b].transpose());
          flux(s * n + b) = side * weight * (eps * nu).dot(frame.tau);
        }
      }
      const double w = line.weights[q] * len * mu;
      local += w * ((alpha / len) * jump * jump.transpose() - flux * jump.transpose() - jump * flux.transpose());
    }
    scatter(trip, dofs, dofs, local);
  }
  return from_triplets(V.num_dofs(), V.num_dofs(), trip);
}

double divergence_norm(const FeField& u) {
  const FeSpace& V = u.space();
  require_bdm(V);
  const SurfaceMesh& mesh = V.mesh();
  const QuadratureRule rule = triangle_rule(2 * V.reference().polynomial_degree());
  double acc = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto dofs = V.local_dofs(t);
    const auto signs = V.local_signs(t);
    Eigen::VectorXd c(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = dofs[i] >= 0 ? signs[i] * u.coeffs()(dofs[i]) : 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double d = V.reference().divergences(rule.points[q]).dot(c) / g.J;
      acc += rule.weights[q] * g.J * d * d;
    }
  }
  return std::sqrt(acc);
}

SparseMatrix assemble_convection(const FeSpace& V, const FeField& w, double div_tol) {
  require_bdm(V);
  const FeSpace& W = w.space();
  require_bdm(W);
  if (!W.same_mesh(V)) throw Error(Errc::DimensionMismatch, "advecting field lives on another mesh");
  const SurfaceMesh& mesh = V.mesh();
  if (w.coeffs().lpNorm<Eigen::Infinity>() == 0.0) return SparseMatrix(V.num_dofs(), V.num_dofs());
  const double w_norm = std::sqrt(w.coeffs().dot(assemble_mass(W) * w.coeffs()));
  if (divergence_norm(w) > div_tol * w_norm / mesh.min_edge_length())
    throw Error(Errc::NotDivergenceFree, "advecting field is not divergence free");

  auto local_w = [&](int t) {
    const auto dofs = W.local_dofs(t);
    const auto signs = W.local_signs(t);
    Eigen::VectorXd c(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = dofs[i] >= 0 ? signs[i] * w.coeffs()(dofs[i]) : 0.0;
    return c;
  };

  const int n = V.num_local_dofs();
  Triplets trip;
  const QuadratureRule rule = triangle_rule(triangle_quadrature_degree(V));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd signs = sign_vector(V, t);
    const Eigen::VectorXd wc = local_w(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3 wq = g.piola(W.reference().vector_values(rule.points[q]) * wc);
      const Eigen::Matrix3Xd vals = physical_vectors(V, g, signs, rule.points[q]);
      const auto grads = physical_vector_gradients(V, g, signs, rule.points[q]);
      const double weight = rule.weights[q] * g.J;
      for (int i = 0; i < n; ++i) {
        const Vec3 dv = grads[i] * wq;  // derivative of test function i along w
        for (int j = 0; j < n; ++j) local(i, j) -= weight * vals.col(j).dot(dv);
      }
    }
    const auto dofs = V.local_dofs(t);
    scatter(trip, dofs, dofs, local);
  }

  const LineRule line = line_rule(edge_quadrature_degree(V));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    const EdgeFrame frame = edge_frames(mesh, e);
    const double len = mesh.edge_length(e);
    const int sides = edge.is_boundary() ? 1 : 2;
    std::array<ElementGeometry, 2> geo;
    std::array<Eigen::VectorXd, 2> signs, wc;
    std::vector<int> dofs;
    for (int s = 0; s < sides; ++s) {
      geo[s] = element_geometry(mesh, edge.tri[s]);
      signs[s] = sign_vector(V, edge.tri[s]);
      wc[s] = local_w(edge.tri[s]);
      const auto d = V.local_dofs(edge.tri[s]);
      dofs.insert(dofs.end(), d.begin(), d.end());
    }
    const int m = sides * n;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    for (int q = 0; q < line.size(); ++q) {
      std::array<Eigen::Matrix3Xd, 2> vals;
      std::array<double, 2> beta{0.0, 0.0};
      for (int s = 0; s < sides; ++s) {
        const Eigen::Vector2d p = edge_reference_point(mesh, edge.tri[s], edge.local[s], line.points[q]);
        vals[s] = physical_vectors(V, geo[s], signs[s], p);
        const Vec3 nu = s == 0 ? frame.nu1 : *frame.nu2;
        beta[s] = geo[s].piola(W.reference().vector_values(p) * wc[s]).dot(nu);
      }
      const double weight = line.weights[q] * len;
      if (sides == 1) {
        // outflow only; inflow data is homogeneous
        if (beta[0] > 0.0) local += weight * beta[0] * vals[0].transpose() * vals[0];
        continue;
      }
      const double b = 0.5 * (beta[0] - beta[1]);  // w . nu1, single valued
      const int up = b >= 0.0 ? 0 : 1;
      for (int s = 0; s < 2; ++s) {
        const Vec3 nu = s == 0 ? frame.nu1 : *frame.nu2;
        const double bs = s == 0 ? b : -b;
        // normal part from the own side, tangential part from the upwind side
        const Eigen::RowVectorXd test_n = nu.transpose() * vals[s];
        const Eigen::RowVectorXd test_t = frame.tau.transpose() * vals[s];
        const Eigen::RowVectorXd trial_t = frame.tau.transpose() * vals[up];
        local.block(s * n, s * n, n, n) += weight * bs * test_n.transpose() * test_n;
        local.block(s * n, up * n, n, n) += weight * bs * test_t.transpose() * trial_t;
      }
    }
    scatter(trip, dofs, dofs, local);
  }
  return from_triplets(V.num_dofs(), V.num_dofs(), trip);
}

Eigen::VectorXd assemble_load(const FeSpace& V, const VectorFunction& f) {
  require_bdm(V);
  const SurfaceMesh& mesh = V.mesh();
  const QuadratureRule rule = triangle_rule(triangle_quadrature_degree(V));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V.num_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd signs = sign_vector(V, t);
    const auto dofs = V.local_dofs(t);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dofs.size());
    for (int q = 0; q < rule.size(); ++q) {
      Vec3 fq = f(t, g.map(rule.points[q]));
      fq -= fq.dot(g.normal) * g.normal;
      local += rule.weights[q] * g.J * physical_vectors(V, g, signs, rule.points[q]).transpose() * fq;
    }
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0) out(dofs[i]) += local(i);
  }
  return out;
}

Eigen::VectorXd assemble_load(const FeSpace& S, const ScalarFunction& f) {
  if (S.is_vector() || S.kind() == SpaceKind::FacetTangential)
    throw Error(Errc::UnsupportedCombination, "scalar load needs a scalar space");
  const SurfaceMesh& mesh = S.mesh();
  const QuadratureRule rule = triangle_rule(2 * S.reference().polynomial_degree() + 3);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(S.num_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto dofs = S.local_dofs(t);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(dofs.size());
    for (int q = 0; q < rule.size(); ++q)
      local += rule.weights[q] * g.J * f(t, g.map(rule.points[q])) * S.reference().values(rule.points[q]);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0) out(dofs[i]) += local(i);
  }
  return out;
}

Eigen::VectorXd assemble_mean(const FeSpace& S) {
  return assemble_load(S, ScalarFunction([](int, const Vec3&) { return 1.0; }));
}

SparseMatrix assemble_bdm_transfer(const FeSpace& from, const FeSpace& to) {
  require_bdm(from);
  require_bdm(to);
  if (to.degree() < from.degree())
    throw Error(Errc::DegreeMismatch, "target degree must not be lower than the source degree");
  if (!from.same_mesh(to)) throw Error(Errc::DimensionMismatch, "spaces live on different meshes");
  const SurfaceMesh& mesh = to.mesh();
  const ReferenceElement& rf = from.reference();
  const ReferenceElement& rt = to.reference();
  Eigen::MatrixXd local(rt.num_basis(), rf.num_basis());
  for (int a = 0; a < rf.num_basis(); ++a)
    local.col(a) = rt.apply_vector_dofs([&](const Eigen::Vector2d& p) { return Eigen::Vector2d(rf.vector_values(p).col(a)); });
  const int per_edge = rt.dofs_per_edge();
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto tdofs = to.local_dofs(t);
    const auto tsigns = to.local_signs(t);
    const auto fdofs = from.local_dofs(t);
    const auto fsigns = from.local_signs(t);
    for (int i = 0; i < rt.num_basis(); ++i) {
      if (tdofs[i] < 0) continue;
      if (i < 3 * per_edge && mesh.edge(mesh.triangle_edge(t, i / per_edge)).tri[0] != t) continue;
      for (int a = 0; a < rf.num_basis(); ++a) {
        const double val = tsigns[i] * fsigns[a] * local(i, a);
        if (fdofs[a] >= 0 && std::abs(val) > 1e-14) trip.emplace_back(tdofs[i], fdofs[a], val);
      }
    }
  }
  return from_triplets(to.num_dofs(), from.num_dofs(), trip);
}

double symmetry_defect(const SparseMatrix& A) {
  if (A.nonZeros() == 0) return 0.0;
  const SparseMatrix At = A.transpose();
  const SparseMatrix diff = A - At;
  double dmax = 0.0, amax = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : 0.0;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace surfhodge
