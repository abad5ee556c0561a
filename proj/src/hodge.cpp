// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/hodge.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"

#include "surfhodge/error.hpp"

namespace surfhodge {

namespace {

Constraint stream_constraint(const TopologySummary& topo) {
  return topo.closed() ? Constraint::ZeroMean : Constraint::ZeroBoundaryTrace;
}

void require_field_in(const FeSpace& space, const FeField& f, const char* what) {
  const FeSpace& s = f.space();
  if (s.kind() != space.kind() || s.degree() != space.degree() || s.num_dofs() != space.num_dofs())
    throw Error(Errc::DimensionMismatch, std::string(what) + " does not live in the expected space");
}

}  // namespace

HodgeContext::HodgeContext(const SurfaceMesh& mesh, int k)
    : mesh_(&mesh),
      k_(k),
      topo_(analyze_topology(mesh)),
      S_(mesh, SpaceKind::Lagrange, k + 1, stream_constraint(topo_)),
      V_(mesh, SpaceKind::BDM, k, Constraint::ZeroNormalTrace),
      Q_(mesh, SpaceKind::DGPressure, std::max(k - 1, 0), Constraint::None) {
  require_connected(mesh);
  M_ = assemble_mass(V_);
  E_ = assemble_rot_embedding(S_, V_);
  B_ = assemble_div(V_, Q_);
  K_ = SparseMatrix(E_.transpose() * (M_ * E_));
  K_.prune(0.0);
  MQ_ = assemble_mass(Q_);
  s_mean_ = assemble_mean(S_);
  q_mean_ = assemble_mean(Q_);
}

const FactorizedOperator& HodgeContext::streamfunction_solver() const {
  if (!k_solver_) {
    if (closed())
      k_solver_ = std::make_unique<FactorizedOperator>(bordered(K_, s_mean_), FactorKind::SymmetricIndefinite);
    else
      k_solver_ = std::make_unique<FactorizedOperator>(K_, FactorKind::SPD);
  }
  return *k_solver_;
}

Eigen::VectorXd HodgeContext::solve_streamfunction(const Eigen::VectorXd& rhs) const {
  const int n = S_.num_dofs();
  if (rhs.size() != n) throw Error(Errc::DimensionMismatch, "streamfunction right-hand side has wrong length");
  if (!closed()) return streamfunction_solver().solve(rhs);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b.head(n) = rhs;
  return streamfunction_solver().solve(b).head(n);
}

SparseMatrix HodgeContext::saddle_matrix(const SparseMatrix& A) const {
  const int nv = V_.num_dofs(), nq = Q_.num_dofs();
  const SparseMatrix Bt = B_.transpose();
  SparseMatrix m(nq, 1);
  for (int i = 0; i < nq; ++i)
    if (q_mean_(i) != 0.0) m.insert(i, 0) = q_mean_(i);
  const SparseMatrix mt = m.transpose();
  return block_matrix({{&A, &Bt, nullptr}, {&B_, nullptr, &m}, {nullptr, &mt, nullptr}}, {nv, nq, 1}, {nv, nq, 1});
}

const FactorizedOperator& HodgeContext::mixed_solver() const {
  if (!mixed_solver_)
    mixed_solver_ = std::make_unique<FactorizedOperator>(saddle_matrix(M_), FactorKind::SymmetricIndefinite);
  return *mixed_solver_;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> HodgeContext::solve_mixed(const Eigen::VectorXd& g) const {
  const int nv = V_.num_dofs(), nq = Q_.num_dofs();
  if (g.size() != nv) throw Error(Errc::DimensionMismatch, "load vector has wrong length");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nv + nq + 1);
  b.head(nv) = g;
  const Eigen::VectorXd x = mixed_solver().solve(b);
  return {x.head(nv), x.segment(nv, nq)};
}

HelmholtzResult helmholtz_project_load(const HodgeContext& ctx, const Eigen::VectorXd& g) {
  auto [u, lambda] = ctx.solve_mixed(g);
  return {std::move(u), std::move(lambda)};
}

HelmholtzResult helmholtz_project(const HodgeContext& ctx, const FeField& r) {
  require_field_in(ctx.V(), r, "field");
  return helmholtz_project_load(ctx, ctx.mass() * r.coeffs());
}

Eigen::MatrixXd HarmonicBasis::matrix() const {
  Eigen::MatrixXd H(num_dofs, size());
  for (int i = 0; i < size(); ++i) H.col(i) = fields[i];
  return H;
}

HarmonicBasis harmonic_basis(const HodgeContext& ctx, const HarmonicOptions& options) {
  HarmonicBasis basis;
  basis.k = ctx.k();
  basis.seed = options.seed;
  basis.tol = options.tol;
  basis.b1 = ctx.topology().b1;
  basis.num_dofs = ctx.V().num_dofs();
  basis.mesh_checksum = mesh_checksum(ctx.mesh());
  if (basis.b1 == 0) return basis;

  const SparseMatrix& M = ctx.mass();
  const SparseMatrix& E = ctx.embedding();
  const int max_attempts = options.max_attempts >= 0 ? options.max_attempts : 20 * basis.b1 + 20;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  const int n = basis.num_dofs;
  while (basis.size() < basis.b1) {
    if (basis.attempts >= max_attempts)
      throw Error(Errc::MaxAttemptsExceeded, "accepted " + std::to_string(basis.size()) + " of " +
                                                 std::to_string(basis.b1) + " harmonic fields after " +
                                                 std::to_string(basis.attempts) + " samples");
    ++basis.attempts;
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r(i) = gauss(rng);
    r /= m_norm(M, r);
    const Eigen::VectorXd u = helmholtz_project_load(ctx, M * r).u;
    Eigen::VectorXd w = u - E * ctx.solve_streamfunction(E.transpose() * (M * u));
    // second pass removes what the first solve left behind
    w -= E * ctx.solve_streamfunction(E.transpose() * (M * w));
    w = m_orthogonalize(w, basis.fields, M);
    const double norm = m_norm(M, w);
    if (norm < options.tol) continue;
    basis.fields.push_back(w / norm);
  }
  return basis;
}

void check_basis(const HodgeContext& ctx, const HarmonicBasis& basis) {
  if (basis.k != ctx.k())
    throw Error(Errc::BasisMismatch,
                "basis has degree " + std::to_string(basis.k) + ", context has " + std::to_string(ctx.k()));
  if (basis.num_dofs != ctx.V().num_dofs() || basis.mesh_checksum != mesh_checksum(ctx.mesh()))
    throw Error(Errc::BasisMismatch, "basis was built on a different mesh");
  for (const Eigen::VectorXd& f : basis.fields)
    if (f.size() != basis.num_dofs) throw Error(Errc::BasisMismatch, "basis vector has wrong length");
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_basis(std::ostream& out, const HarmonicBasis& basis) {
  nlohmann::json j;
  j["format"] = "surfhodge-harmonic-basis";
  j["version"] = 1;
  j["k"] = basis.k;
  j["seed"] = basis.seed;
  j["tol"] = basis.tol;
  j["b1"] = basis.b1;
  j["num_dofs"] = basis.num_dofs;
  j["mesh_checksum"] = hex64(basis.mesh_checksum);
  j["attempts"] = basis.attempts;
  j["fields"] = nlohmann::json::array();
  for (const Eigen::VectorXd& f : basis.fields) j["fields"].push_back(std::vector<double>(f.data(), f.data() + f.size()));
  out << j.dump() << '\n';
}

HarmonicBasis read_basis(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("harmonic basis: ") + e.what());
  }
  HarmonicBasis b;
  try {
    if (j.at("format") != "surfhodge-harmonic-basis") throw Error(Errc::ParseError, "not a harmonic basis file");
    if (j.at("version") != 1) throw Error(Errc::ParseError, "unsupported harmonic basis version");
    b.k = j.at("k");
    b.seed = j.at("seed");
    b.tol = j.at("tol");
    b.b1 = j.at("b1");
    b.num_dofs = j.at("num_dofs");
    b.mesh_checksum = std::stoull(j.at("mesh_checksum").get<std::string>(), nullptr, 16);
    b.attempts = j.value("attempts", 0);
    for (const auto& f : j.at("fields")) {
      const std::vector<double> v = f.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != b.num_dofs) throw Error(Errc::ParseError, "basis vector has wrong length");
      b.fields.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("harmonic basis: ") + e.what());
  }
  return b;
}

void save_basis(const std::filesystem::path& path, const HarmonicBasis& basis) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_basis(out, basis);
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

HarmonicBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  return read_basis(in);
}

HodgeComponents decompose(const HodgeContext& ctx, const HarmonicBasis& basis, const FeField& v) {
  check_basis(ctx, basis);
  require_field_in(ctx.V(), v, "field");
  const SparseMatrix& M = ctx.mass();
  const SparseMatrix& E = ctx.embedding();
  const Eigen::VectorXd Mv = M * v.coeffs();
  HodgeComponents out;
  out.psi = ctx.solve_streamfunction(E.transpose() * Mv);
  out.rot_part = E * out.psi;
  out.h.resize(basis.size());
  out.harmonic_part = Eigen::VectorXd::Zero(v.coeffs().size());
  for (int i = 0; i < basis.size(); ++i) {
    out.h(i) = basis.fields[i].dot(Mv);
    out.harmonic_part += out.h(i) * basis.fields[i];
  }
  const HelmholtzResult proj = helmholtz_project_load(ctx, Mv);
  out.lambda = proj.lambda;
  out.gradient_part = v.coeffs() - proj.u;
  out.residual_norm = m_norm(M, proj.u - out.rot_part - out.harmonic_part);
  return out;
}

double p0_inner(const SurfaceMesh& mesh, const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) s += mesh.area(t) * a[t].dot(b[t]);
  return s;
}

double p0_norm(const SurfaceMesh& mesh, const std::vector<Vec3>& v) { return std::sqrt(p0_inner(mesh, v, v)); }

P0Decomposition decompose_p0_incomplete(const HodgeContext& ctx, const HarmonicBasis& basis,
                                        const std::vector<Vec3>& v_in) {
  if (ctx.k() != 0)
    throw Error(Errc::WrongDegree, "the piecewise constant splitting needs k = 0, got " + std::to_string(ctx.k()));
  check_basis(ctx, basis);
  const SurfaceMesh& mesh = ctx.mesh();
  const int nt = mesh.num_triangles();
  if (static_cast<int>(v_in.size()) != nt)
    throw Error(Errc::DimensionMismatch, "expected one vector per triangle");
  std::vector<Vec3> v(nt);
  for (int t = 0; t < nt; ++t) {
    const Vec3 n = mesh.normal(t);
    v[t] = v_in[t] - v_in[t].dot(n) * n;
  }

  const std::vector<Eigen::Vector3d> centroid = {Eigen::Vector3d::Constant(1.0 / 3.0)};
  const Eigen::Vector2d center(1.0 / 3.0, 1.0 / 3.0);
  P0Decomposition out;

  // streamfunction part
  const FeSpace& S = ctx.S();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S.num_dofs());
  std::vector<Eigen::Matrix3Xd> rot_basis(nt);
  for (int t = 0; t < nt; ++t) {
    const Eigen::Matrix3Xd grads = eval_basis(S, t, centroid).gradients[0];
    Eigen::Matrix3Xd rots(3, grads.cols());
    for (int i = 0; i < grads.cols(); ++i) rots.col(i) = -mesh.normal(t).cross(Vec3(grads.col(i)));
    rot_basis[t] = rots;
    const auto dofs = S.local_dofs(t);
    for (int i = 0; i < static_cast<int>(dofs.size()); ++i)
      if (dofs[i] >= 0) rhs(dofs[i]) += mesh.area(t) * rots.col(i).dot(v[t]);
  }
  out.psi = ctx.solve_streamfunction(rhs);
  out.rot_part.assign(nt, Vec3::Zero());
  for (int t = 0; t < nt; ++t) {
    const auto dofs = S.local_dofs(t);
    for (int i = 0; i < static_cast<int>(dofs.size()); ++i)
      if (dofs[i] >= 0) out.rot_part[t] += out.psi(dofs[i]) * rot_basis[t].col(i);
  }

  // broken gradient part
  const FeSpace CR = build_space(mesh, SpaceKind::CrouzeixRaviart, 1, Constraint::ZeroMean);
  Eigen::VectorXd crhs = Eigen::VectorXd::Zero(CR.num_dofs());
  std::vector<Eigen::Matrix3Xd> cr_grads(nt);
  for (int t = 0; t < nt; ++t) {
    cr_grads[t] = eval_basis(CR, t, centroid).gradients[0];
    const auto dofs = CR.local_dofs(t);
    for (int i = 0; i < 3; ++i) crhs(dofs[i]) += mesh.area(t) * cr_grads[t].col(i).dot(v[t]);
  }
  out.phi = solve_zero_mean(assemble_stiffness(CR), assemble_mean(CR), crhs);
  out.gradient_part.assign(nt, Vec3::Zero());
  for (int t = 0; t < nt; ++t) {
    const auto dofs = CR.local_dofs(t);
    for (int i = 0; i < 3; ++i) out.gradient_part[t] += out.phi(dofs[i]) * cr_grads[t].col(i);
  }

  // harmonic part through the centroid values of the k = 0 harmonic fields
  const int b = basis.size();
  std::vector<std::vector<Vec3>> hbar(b, std::vector<Vec3>(nt));
  for (int i = 0; i < b; ++i) {
    const FeField h(ctx.V(), basis.fields[i]);
    for (int t = 0; t < nt; ++t) hbar[i][t] = evaluate_vector(h, t, center);
  }
  std::vector<Vec3> rest(nt);
  for (int t = 0; t < nt; ++t) rest[t] = v[t] - out.rot_part[t] - out.gradient_part[t];
  out.h = Eigen::VectorXd::Zero(b);
  if (b > 0) {
    Eigen::MatrixXd G(b, b);
    Eigen::VectorXd g(b);
    for (int i = 0; i < b; ++i) {
      g(i) = p0_inner(mesh, hbar[i], rest);
      for (int j = 0; j < b; ++j) G(i, j) = p0_inner(mesh, hbar[i], hbar[j]);
    }
    out.h = G.ldlt().solve(g);
  }
  out.harmonic_part.assign(nt, Vec3::Zero());
  for (int i = 0; i < b; ++i)
    for (int t = 0; t < nt; ++t) out.harmonic_part[t] += out.h(i) * hbar[i][t];
  out.remainder.resize(nt);
  for (int t = 0; t < nt; ++t) out.remainder[t] = rest[t] - out.harmonic_part[t];
  out.remainder_norm = p0_norm(mesh, out.remainder);
  return out;
}

DimensionReport verify_dimension(const TopologySummary& topo, int k) {
  DimensionReport r;
  r.k = k;
  const int dim_v = count_dofs(topo, SpaceKind::BDM, k, Constraint::ZeroNormalTrace).total;
  const int dim_q = count_dofs(topo, SpaceKind::DGPressure, std::max(k - 1, 0), Constraint::None).total;
  // div maps onto the mean-free pressures
  r.dim_divergence_free = dim_v - (dim_q - 1);
  r.dim_rot = count_dofs(topo, SpaceKind::Lagrange, k + 1, stream_constraint(topo)).effective;
  r.difference = r.dim_divergence_free - r.dim_rot;
  r.b1 = 1 + (topo.closed() ? 1 : 0) - topo.euler_characteristic;
  return r;
}

}  // namespace surfhodge
