// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/fespace.hpp"

#include <cmath>

#include "surfhodge/error.hpp"

namespace surfhodge {

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::None: return "none";
    case Constraint::ZeroBoundaryTrace: return "zero_boundary_trace";
    case Constraint::ZeroMean: return "zero_mean";
    case Constraint::ZeroNormalTrace: return "zero_normal_trace";
  }
  return "unknown";
}

ElementGeometry element_geometry(const SurfaceMesh& mesh, int t) {
  if (t < 0 || t >= mesh.num_triangles()) throw Error(Errc::IndexOutOfRange, "triangle index " + std::to_string(t));
  const auto& tri = mesh.triangle(t);
  ElementGeometry g;
  g.x0 = mesh.position(tri[0]);
  g.F.col(0) = mesh.position(tri[1]) - g.x0;
  g.F.col(1) = mesh.position(tri[2]) - g.x0;
  const Vec3 c = g.F.col(0).cross(g.F.col(1));
  g.J = c.norm();
  if (!(g.J > 0.0)) throw Error(Errc::DegenerateTriangle, "triangle " + std::to_string(t) + " has zero area");
  g.normal = c / g.J;
  const Eigen::Matrix2d metric = g.F.transpose() * g.F;
  g.F_pinv = metric.inverse() * g.F.transpose();
  return g;
}

Vec3 piola_map(const SurfaceMesh& mesh, int t, const Eigen::Vector2d& reference_value) {
  return element_geometry(mesh, t).piola(reference_value);
}

namespace {

bool allowed(SpaceKind kind, Constraint c) {
  switch (kind) {
    case SpaceKind::Lagrange:
    case SpaceKind::CrouzeixRaviart:
      return c == Constraint::None || c == Constraint::ZeroMean || c == Constraint::ZeroBoundaryTrace;
    case SpaceKind::BDM: return c == Constraint::None || c == Constraint::ZeroNormalTrace;
    case SpaceKind::DGPressure: return c == Constraint::None || c == Constraint::ZeroMean;
    case SpaceKind::FacetTangential: return c == Constraint::None;
  }
  return false;
}

void check_combination(SpaceKind kind, int degree, Constraint c) {
  const bool degree_ok = (kind == SpaceKind::Lagrange && degree >= 1) ||
                         (kind == SpaceKind::CrouzeixRaviart && degree == 1) ||
                         ((kind == SpaceKind::BDM || kind == SpaceKind::DGPressure ||
                           kind == SpaceKind::FacetTangential) && degree >= 0);
  if (!degree_ok || !allowed(kind, c))
    throw Error(Errc::UnsupportedCombination, std::string(to_string(kind)) + "(" + std::to_string(degree) + ") with " +
                                                  std::string(to_string(c)));
}

}  // namespace

FeSpace::FeSpace(const SurfaceMesh& mesh, SpaceKind kind, int degree, Constraint constraint)
    : mesh_(&mesh), kind_(kind), degree_(degree), constraint_(constraint) {
  check_combination(kind, degree, constraint);
  if (constraint == Constraint::ZeroMean) require_connected(mesh);
  reference_ = make_reference_element(kind, degree);

  const int nv = mesh.num_vertices(), ne = mesh.num_edges(), nt = mesh.num_triangles();
  const ReferenceElement& ref = *reference_;
  const int nloc = ref.num_basis();
  const int pv = ref.dofs_per_vertex(), pe = ref.dofs_per_edge(), pi = ref.dofs_per_interior();
  const int edge_offset = pv * nv;
  const int interior_offset = edge_offset + pe * ne;
  const int raw_total = interior_offset + pi * nt;

  dofs_.assign(static_cast<std::size_t>(nloc) * nt, -1);
  signs_.assign(static_cast<std::size_t>(nloc) * nt, 1.0);
  std::vector<char> removed(raw_total, 0);
  const bool strip_boundary =
      constraint == Constraint::ZeroBoundaryTrace || constraint == Constraint::ZeroNormalTrace;

  for (int t = 0; t < nt; ++t) {
    int* d = dofs_.data() + static_cast<std::size_t>(nloc) * t;
    double* s = signs_.data() + static_cast<std::size_t>(nloc) * t;
    int loc = 0;
    for (int v = 0; v < 3 && pv > 0; ++v) {
      const int gv = mesh.triangle(t)[v];
      d[loc++] = gv;
      if (strip_boundary && mesh.is_boundary_vertex(gv)) removed[gv] = 1;
    }
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.triangle_edge(t, i);
      const int dir = mesh.edge_direction(t, i);
      const Edge& edge = mesh.edge(e);
      const double normal_sign = edge.tri[0] == t ? 1.0 : -1.0;
      for (int j = 0; j < pe; ++j) {
        int idx = j;
        double sign = 1.0;
        if (kind == SpaceKind::Lagrange) {
          idx = dir > 0 ? j : pe - 1 - j;
        } else if (kind == SpaceKind::BDM) {
          sign = normal_sign * ((dir < 0 && j % 2 == 1) ? -1.0 : 1.0);
        }
        const int g = edge_offset + pe * e + idx;
        if (strip_boundary && edge.is_boundary()) removed[g] = 1;
        s[loc] = sign;
        d[loc++] = g;
      }
    }
    for (int m = 0; m < pi; ++m) d[loc++] = interior_offset + pi * t + m;
  }

  std::vector<int> compact(raw_total, -1);
  for (int g = 0; g < raw_total; ++g)
    if (!removed[g]) compact[g] = num_dofs_++;
  for (int& g : dofs_) g = compact[g];
}

std::span<const int> FeSpace::local_dofs(int t) const {
  if (t < 0 || t >= mesh_->num_triangles()) throw Error(Errc::IndexOutOfRange, "triangle index " + std::to_string(t));
  const auto n = static_cast<std::size_t>(num_local_dofs());
  return {dofs_.data() + n * t, n};
}

std::span<const double> FeSpace::local_signs(int t) const {
  if (t < 0 || t >= mesh_->num_triangles()) throw Error(Errc::IndexOutOfRange, "triangle index " + std::to_string(t));
  const auto n = static_cast<std::size_t>(num_local_dofs());
  return {signs_.data() + n * t, n};
}

FeSpace build_space(const SurfaceMesh& mesh, SpaceKind kind, int degree, Constraint constraint) {
  return FeSpace(mesh, kind, degree, constraint);
}

DofCount count_dofs(const TopologySummary& topo, SpaceKind kind, int degree, Constraint constraint) {
  check_combination(kind, degree, constraint);
  const long nv = topo.num_vertices, ne = topo.num_edges, nt = topo.num_triangles;
  const long nvi = topo.interior_vertices, nei = topo.interior_edges;
  long total = 0;
  switch (kind) {
    case SpaceKind::Lagrange: {
      const long p = degree;
      const long interior = (p - 1) * (p - 2) / 2;
      total = constraint == Constraint::ZeroBoundaryTrace ? nvi + (p - 1) * nei + interior * nt
                                                          : nv + (p - 1) * ne + interior * nt;
      break;
    }
    case SpaceKind::BDM: {
      const long k = degree;
      const long edges = constraint == Constraint::ZeroNormalTrace ? nei : ne;
      total = (k + 1) * edges + (k >= 1 ? (k + 1) * (k - 1) * nt : 0);
      break;
    }
    case SpaceKind::DGPressure: total = (degree + 1L) * (degree + 2L) / 2 * nt; break;
    case SpaceKind::CrouzeixRaviart: total = constraint == Constraint::ZeroBoundaryTrace ? nei : ne; break;
    case SpaceKind::FacetTangential: total = (degree + 1L) * ne; break;
  }
  DofCount c;
  c.total = static_cast<int>(total);
  c.effective = c.total - (constraint == Constraint::ZeroMean ? 1 : 0);
  return c;
}

FeField::FeField(const FeSpace& space) : space_(&space), coeffs_(Eigen::VectorXd::Zero(space.num_dofs())) {}

FeField::FeField(const FeSpace& space, Eigen::VectorXd coeffs) : space_(&space), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space.num_dofs())
    throw Error(Errc::DimensionMismatch, "field has " + std::to_string(coeffs_.size()) + " coefficients, space has " +
                                             std::to_string(space.num_dofs()));
  if (!coeffs_.allFinite()) throw Error(Errc::NaNDetected, "field coefficients are not finite");
}

namespace {

void require_evaluable(const FeSpace& space) {
  if (space.kind() == SpaceKind::FacetTangential)
    throw Error(Errc::UnsupportedCombination, "facet space supports dof counting only");
}

}  // namespace

BasisEvaluation eval_basis(const FeSpace& space, int t, const std::vector<Eigen::Vector3d>& barycentric) {
  require_evaluable(space);
  const ElementGeometry g = element_geometry(space.mesh(), t);
  const ReferenceElement& ref = space.reference();
  const auto signs = space.local_signs(t);
  const Eigen::Map<const Eigen::VectorXd> sign_vec(signs.data(), static_cast<Eigen::Index>(signs.size()));
  const int n = ref.num_basis();
  const int np = static_cast<int>(barycentric.size());
  BasisEvaluation out;
  if (space.is_vector()) {
    out.divergence.resize(np, n);
    for (int q = 0; q < np; ++q) {
      const Eigen::Vector2d p(barycentric[q](1), barycentric[q](2));
      out.vectors.push_back((g.F * ref.vector_values(p) / g.J) * sign_vec.asDiagonal());
      out.divergence.row(q) = (ref.divergences(p).cwiseProduct(sign_vec) / g.J).transpose();
    }
  } else {
    out.values.resize(np, n);
    for (int q = 0; q < np; ++q) {
      const Eigen::Vector2d p(barycentric[q](1), barycentric[q](2));
      out.values.row(q) = ref.values(p).transpose();
      out.gradients.push_back(g.F_pinv.transpose() * ref.gradients(p));
    }
  }
  return out;
}

namespace {

Eigen::VectorXd local_coeffs(const FeField& f, int t) {
  const FeSpace& space = f.space();
  const auto dofs = space.local_dofs(t);
  const auto signs = space.local_signs(t);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = dofs[i] >= 0 ? signs[i] * f.coeffs()(dofs[i]) : 0.0;
  return c;
}

}  // namespace

double evaluate_scalar(const FeField& f, int t, const Eigen::Vector2d& p) {
  require_evaluable(f.space());
  return f.space().reference().values(p).dot(local_coeffs(f, t));
}

Vec3 evaluate_scalar_gradient(const FeField& f, int t, const Eigen::Vector2d& p) {
  require_evaluable(f.space());
  const ElementGeometry g = element_geometry(f.space().mesh(), t);
  return g.gradient(f.space().reference().gradients(p) * local_coeffs(f, t));
}

Vec3 evaluate_vector(const FeField& f, int t, const Eigen::Vector2d& p) {
  const ElementGeometry g = element_geometry(f.space().mesh(), t);
  return g.piola(f.space().reference().vector_values(p) * local_coeffs(f, t));
}

double evaluate_divergence(const FeField& f, int t, const Eigen::Vector2d& p) {
  const ElementGeometry g = element_geometry(f.space().mesh(), t);
  return f.space().reference().divergences(p).dot(local_coeffs(f, t)) / g.J;
}

FeField interpolate(const FeSpace& space, const ScalarFunction& f) {
  require_evaluable(space);
  if (space.is_vector()) throw Error(Errc::UnsupportedCombination, "scalar interpolation into a vector space");
  FeField out(space);
  const SurfaceMesh& mesh = space.mesh();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd local = space.reference().apply_dofs([&](const Eigen::Vector2d& p) { return f(t, g.map(p)); });
    const auto dofs = space.local_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0) out.coeffs()(dofs[i]) = local(i);
  }
  return out;
}

FeField interpolate(const FeSpace& space, const VectorFunction& v) {
  if (!space.is_vector()) throw Error(Errc::UnsupportedCombination, "vector interpolation into a scalar space");
  FeField out(space);
  const SurfaceMesh& mesh = space.mesh();
  const int per_edge = space.reference().dofs_per_edge();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const Eigen::VectorXd local = space.reference().apply_vector_dofs(
        [&](const Eigen::Vector2d& p) { return g.inverse_piola(v(t, g.map(p))); });
    const auto dofs = space.local_dofs(t);
    const auto signs = space.local_signs(t);
    for (int i = 0; i < static_cast<int>(dofs.size()); ++i) {
      if (dofs[i] < 0) continue;
      if (i < 3 * per_edge && mesh.edge(mesh.triangle_edge(t, i / per_edge)).tri[0] != t) continue;
      out.coeffs()(dofs[i]) = signs[i] * local(i);
    }
  }
  return out;
}

}  // namespace surfhodge
