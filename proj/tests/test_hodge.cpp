// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "surfhodge/error.hpp"
#include "surfhodge/hodge.hpp"
#include "surfhodge/meshgen.hpp"

using namespace surfhodge;

namespace {

Errc error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::ParseError;
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

int dense_rank(const Eigen::MatrixXd& A, double rel = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel * s(0)).count());
}

void check_basis_structure(const HodgeContext& ctx, const HarmonicBasis& basis) {
  const SparseMatrix& M = ctx.mass();
  const int b = basis.size();
  CHECK((gram_matrix(basis.fields, M) - Eigen::MatrixXd::Identity(b, b)).cwiseAbs().maxCoeff() <= 1e-10);
  for (const Eigen::VectorXd& h : basis.fields) {
    CHECK((ctx.div() * h).norm() <= 1e-10 * m_norm(M, h));
    CHECK((ctx.embedding().transpose() * (M * h)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

}  // namespace

TEST_CASE("no harmonic fields on spheres") {
  for (const SurfaceMesh& mesh : {meshgen::tetrahedron(), meshgen::icosphere(1)}) {
    const HodgeContext ctx(mesh, 0);
    const HarmonicBasis basis = harmonic_basis(ctx);
    CHECK(basis.size() == 0);
    CHECK(basis.attempts == 0);
  }
}

TEST_CASE("3x3 torus, k = 0: two orthonormal harmonic fields") {
  const SurfaceMesh mesh = meshgen::torus(3, 3);
  const HodgeContext ctx(mesh, 0);
  CHECK(ctx.S().num_dofs() == 9);
  const HarmonicBasis basis = harmonic_basis(ctx);
  REQUIRE(basis.size() == 2);
  check_basis_structure(ctx, basis);
  // orthogonal to every rot generator
  const Eigen::MatrixXd cross = Eigen::MatrixXd(ctx.embedding()).transpose() * (ctx.mass() * basis.matrix());
  CHECK(cross.rows() == mesh.num_vertices());
  CHECK(cross.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("harmonic basis cardinality on the corpus") {
  struct Case {
    SurfaceMesh mesh;
    int b1;
  };
  std::vector<Case> cases;
  cases.push_back({meshgen::torus(6, 4), 2});
  cases.push_back({meshgen::genus_plate(2), 4});
  cases.push_back({meshgen::holed_sphere(2, 4), 3});
  cases.push_back({meshgen::trefoil_tube(24, 4), 2});
  for (const Case& c : cases) {
    for (int k = 0; k <= 2; ++k) {
      const HodgeContext ctx(c.mesh, k);
      const HarmonicBasis basis = harmonic_basis(ctx, {.seed = 7});
      CHECK(basis.size() == c.b1);
      check_basis_structure(ctx, basis);
    }
  }
}

TEST_CASE("seed independence of the harmonic span") {
  const SurfaceMesh mesh = meshgen::torus(5, 4);
  const HodgeContext ctx(mesh, 0);
  const HarmonicBasis ref = harmonic_basis(ctx, {.seed = 1});
  const Eigen::MatrixXd H = ref.matrix();
  const Eigen::MatrixXd P = H * H.transpose() * Eigen::MatrixXd(ctx.mass());
  for (std::uint64_t seed = 2; seed <= 10; ++seed) {
    const HarmonicBasis other = harmonic_basis(ctx, {.seed = seed});
    REQUIRE(other.size() == 2);
    const Eigen::MatrixXd G = other.matrix();
    CHECK((G - ref.matrix()).norm() > 1e-6);
    const Eigen::MatrixXd Po = G * G.transpose() * Eigen::MatrixXd(ctx.mass());
    CHECK((Po - P).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("attempt budget is enforced") {
  const SurfaceMesh mesh = meshgen::torus(3, 3);
  const HodgeContext ctx(mesh, 0);
  CHECK(error_code_of([&] { harmonic_basis(ctx, {.seed = 1, .tol = 1e-8, .max_attempts = 1}); }) ==
        Errc::MaxAttemptsExceeded);
  // an impossible tolerance rejects every sample
  CHECK(error_code_of([&] { harmonic_basis(ctx, {.seed = 1, .tol = 10.0}); }) == Errc::MaxAttemptsExceeded);
}

TEST_CASE("Helmholtz projection") {
  std::mt19937 rng(21);
  const SurfaceMesh mesh = meshgen::torus(3, 3);
  const HodgeContext ctx(mesh, 1);
  const SparseMatrix& M = ctx.mass();
  const HarmonicBasis basis = harmonic_basis(ctx);

  SUBCASE("rot fields are fixed points") {
    const Eigen::VectorXd r = ctx.embedding() * random_vector(ctx.S().num_dofs(), rng);
    const HelmholtzResult p = helmholtz_project(ctx, FeField(ctx.V(), r));
    CHECK(m_norm(M, p.u - r) <= 1e-10 * m_norm(M, r));
    CHECK(p.lambda.norm() <= 1e-10 * m_norm(M, r));
  }
  SUBCASE("harmonic fields are fixed points") {
    const HelmholtzResult p = helmholtz_project(ctx, FeField(ctx.V(), basis.fields[0]));
    CHECK(m_norm(M, p.u - basis.fields[0]) <= 1e-10);
    CHECK(p.lambda.norm() <= 1e-10);
  }
  SUBCASE("random input") {
    const Eigen::VectorXd r = random_vector(ctx.V().num_dofs(), rng);
    const HelmholtzResult p = helmholtz_project(ctx, FeField(ctx.V(), r));
    CHECK(divergence_norm(FeField(ctx.V(), p.u)) <= 1e-10 * m_norm(M, r));
    // (u, div* q) = (div u, q) for every q
    CHECK((ctx.div() * p.u).lpNorm<Eigen::Infinity>() <= 1e-10 * m_norm(M, r));
    // split M r = M u + B^T lambda, lambda mean free
    CHECK((M * r - M * p.u - Eigen::MatrixXd(ctx.div()).transpose() * p.lambda).norm() <= 1e-10 * r.norm());
    CHECK(std::abs(ctx.q_mean().dot(p.lambda)) <= 1e-10 * p.lambda.norm());
    // idempotent
    const HelmholtzResult again = helmholtz_project(ctx, FeField(ctx.V(), p.u));
    CHECK(m_norm(M, again.u - p.u) <= 1e-12 * m_norm(M, p.u));
    // the remainder is orthogonal to every divergence-free field
    const Eigen::VectorXd grad = r - p.u;
    const Eigen::VectorXd psi = random_vector(ctx.S().num_dofs(), rng);
    CHECK(std::abs(m_inner(M, grad, ctx.embedding() * psi)) <= 1e-10 * m_norm(M, r) * psi.norm());
  }
}

TEST_CASE("decompose: fixed inputs") {
  std::mt19937 rng(22);
  const SurfaceMesh mesh = meshgen::torus(4, 3);
  const HodgeContext ctx(mesh, 1);
  const SparseMatrix& M = ctx.mass();
  const HarmonicBasis basis = harmonic_basis(ctx);

  Eigen::VectorXd psi0 = random_vector(ctx.S().num_dofs(), rng);
  psi0 -= ctx.s_mean().dot(psi0) / ctx.s_mean().sum() * Eigen::VectorXd::Ones(psi0.size());
  const HodgeComponents a = decompose(ctx, basis, FeField(ctx.V(), ctx.embedding() * psi0));
  CHECK((a.psi - psi0).norm() <= 1e-10 * psi0.norm());
  CHECK(a.h.norm() <= 1e-10 * psi0.norm());
  CHECK(a.lambda.norm() <= 1e-10 * psi0.norm());

  const HodgeComponents b = decompose(ctx, basis, FeField(ctx.V(), basis.fields[0]));
  CHECK((b.h - Eigen::Vector2d(1, 0)).norm() <= 1e-10);
  CHECK(m_norm(M, b.rot_part) <= 1e-10);
  CHECK(b.lambda.norm() <= 1e-10);
}

TEST_CASE("decompose: orthogonality, reconstruction, Pythagoras") {
  std::mt19937 rng(23);
  std::vector<SurfaceMesh> meshes;
  meshes.push_back(meshgen::torus(4, 3));
  meshes.push_back(meshgen::holed_sphere(2, 4));
  meshes.push_back(meshgen::genus_plate(2));
  for (const SurfaceMesh& mesh : meshes) {
    for (int k = 0; k <= 2; ++k) {
      const HodgeContext ctx(mesh, k);
      const SparseMatrix& M = ctx.mass();
      const HarmonicBasis basis = harmonic_basis(ctx);
      const Eigen::VectorXd v = random_vector(ctx.V().num_dofs(), rng);
      const HodgeComponents c = decompose(ctx, basis, FeField(ctx.V(), v));
      const double v2 = m_inner(M, v, v);
      CHECK(std::abs(m_inner(M, c.rot_part, c.harmonic_part)) <= 1e-10 * v2);
      CHECK(std::abs(m_inner(M, c.rot_part, c.gradient_part)) <= 1e-10 * v2);
      CHECK(std::abs(m_inner(M, c.harmonic_part, c.gradient_part)) <= 1e-10 * v2);
      CHECK(c.residual_norm <= 1e-10 * std::sqrt(v2));
      const Eigen::VectorXd sum = c.rot_part + c.harmonic_part + c.gradient_part;
      CHECK(m_norm(M, v - sum) <= 1e-10 * std::sqrt(v2));
      const double parts = m_inner(M, c.rot_part, c.rot_part) + c.h.squaredNorm() +
                           m_inner(M, c.gradient_part, c.gradient_part);
      CHECK(std::abs(v2 - parts - c.residual_norm * c.residual_norm) <= 1e-10 * v2);
    }
  }
}

TEST_CASE("basis container round trip and mismatch detection") {
  const SurfaceMesh mesh = meshgen::torus(3, 3);
  const HodgeContext ctx(mesh, 1);
  const HarmonicBasis basis = harmonic_basis(ctx, {.seed = 99});
  std::stringstream io;
  write_basis(io, basis);
  const HarmonicBasis back = read_basis(io);
  CHECK(back.k == 1);
  CHECK(back.seed == 99);
  CHECK(back.b1 == 2);
  CHECK(back.mesh_checksum == basis.mesh_checksum);
  REQUIRE(back.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(back.fields[i] == basis.fields[i]);
  check_basis(ctx, back);

  const HodgeContext ctx0(mesh, 0);
  CHECK(error_code_of([&] { decompose(ctx0, basis, FeField(ctx0.V())); }) == Errc::BasisMismatch);
  const SurfaceMesh other = meshgen::torus(3, 3, 3.0, 1.5);
  const HodgeContext ctx_other(other, 1);
  CHECK(error_code_of([&] { check_basis(ctx_other, basis); }) == Errc::BasisMismatch);

  std::stringstream bad("{\"format\": \"something else\", \"version\": 1}");
  CHECK(error_code_of([&] { read_basis(bad); }) == Errc::ParseError);
  std::stringstream garbage("not json");
  CHECK(error_code_of([&] { read_basis(garbage); }) == Errc::ParseError);
}

TEST_CASE("hierarchy: lowest-order harmonic fields complete rot(S) at higher degree") {
  const SurfaceMesh mesh = meshgen::torus(4, 3);
  const HodgeContext ctx0(mesh, 0);
  const HarmonicBasis h0 = harmonic_basis(ctx0);
  for (int k = 1; k <= 2; ++k) {
    const HodgeContext ctx(mesh, k);
    const SparseMatrix T = assemble_bdm_transfer(ctx0.V(), ctx.V());
    const Eigen::MatrixXd H = T * h0.matrix();
    CHECK((Eigen::MatrixXd(ctx.div()) * H).cwiseAbs().maxCoeff() <= 1e-10);
    const Eigen::MatrixXd E = Eigen::MatrixXd(ctx.embedding());
    Eigen::MatrixXd combined(E.rows(), E.cols() + H.cols());
    combined << E, H;
    const DimensionReport r = verify_dimension(ctx.topology(), k);
    CHECK(dense_rank(combined) == r.dim_divergence_free);
    CHECK(dense_rank(E) == r.dim_rot);
  }
}

TEST_CASE("dimension counts") {
  const DimensionReport tet = verify_dimension(analyze_topology(meshgen::tetrahedron()), 0);
  CHECK(tet.dim_divergence_free == 3);
  CHECK(tet.dim_rot == 3);
  CHECK(tet.difference == 0);
  CHECK(tet.ok());

  const DimensionReport tor = verify_dimension(analyze_topology(meshgen::torus(3, 3)), 0);
  CHECK(tor.dim_divergence_free == 10);
  CHECK(tor.dim_rot == 8);
  CHECK(tor.difference == 2);
  CHECK(tor.ok());

  // closed genus one, 3490 triangles
  const DimensionReport big = verify_dimension(make_topology(1745, 5235, 3490), 3);
  CHECK(big.difference == 2);
  CHECK(big.ok());

  for (const SurfaceMesh& mesh : {meshgen::genus_plate(2), meshgen::holed_sphere(2, 4), meshgen::flat_grid(3, 2)}) {
    const TopologySummary topo = analyze_topology(mesh);
    for (int k = 0; k <= 3; ++k) {
      const DimensionReport r = verify_dimension(topo, k);
      CHECK(r.ok());
      CHECK(r.b1 == topo.b1);
      const HodgeContext ctx(mesh, k);
      CHECK(r.dim_divergence_free == ctx.V().num_dofs() - ctx.Q().num_dofs() + 1);
    }
  }
}

TEST_CASE("piecewise constant splitting on flat patches is complete") {
  std::mt19937 rng(24);
  std::normal_distribution<double> gauss;
  const SurfaceMesh square = meshgen::unit_square_two_triangles();
  const TopologySummary topo = analyze_topology(square);
  CHECK(2 * topo.num_triangles == topo.interior_vertices + topo.num_edges - 1);
  for (const SurfaceMesh& mesh : {square, meshgen::flat_grid(3, 3)}) {
    const HodgeContext ctx(mesh, 0);
    const HarmonicBasis basis = harmonic_basis(ctx);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<Vec3> v(mesh.num_triangles());
      for (Vec3& x : v) x = Vec3(gauss(rng), gauss(rng), 0.0);
      const P0Decomposition d = decompose_p0_incomplete(ctx, basis, v);
      CHECK(d.remainder_norm <= 1e-12 * p0_norm(mesh, v));
      CHECK(std::abs(p0_inner(mesh, d.rot_part, d.gradient_part)) <= 1e-12 * p0_inner(mesh, v, v));
    }
  }
}

TEST_CASE("piecewise constant splitting of a Crouzeix-Raviart gradient") {
  const SurfaceMesh mesh = meshgen::flat_grid(3, 3);
  const HodgeContext ctx(mesh, 0);
  const HarmonicBasis basis = harmonic_basis(ctx);
  const FeSpace CR = build_space(mesh, SpaceKind::CrouzeixRaviart, 1);
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(CR.num_dofs());
  hat(7) = 1.0;
  const FeField phi(CR, hat);
  std::vector<Vec3> v(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) v[t] = evaluate_scalar_gradient(phi, t, {1.0 / 3, 1.0 / 3});
  const P0Decomposition d = decompose_p0_incomplete(ctx, basis, v);
  CHECK(d.psi.norm() <= 1e-12);
  CHECK(d.h.size() == 0);
  const Eigen::VectorXd centered = hat - assemble_mean(CR).dot(hat) / mesh.total_area() * Eigen::VectorXd::Ones(hat.size());
  CHECK((d.phi - centered).norm() <= 1e-12);
}

TEST_CASE("piecewise constant splitting on the torus") {
  std::mt19937 rng(25);
  std::normal_distribution<double> gauss;
  const SurfaceMesh mesh = meshgen::torus(4, 3);
  const HodgeContext ctx(mesh, 0);
  const HarmonicBasis basis = harmonic_basis(ctx);
  const TopologySummary& topo = ctx.topology();
  CHECK(2 * topo.num_triangles == (topo.num_vertices - 1) + 2 + (topo.num_edges - 1));

  // the three generating families together span all piecewise constants
  const int nt = mesh.num_triangles();
  const FeSpace S1 = build_space(mesh, SpaceKind::Lagrange, 1);
  const FeSpace CR = build_space(mesh, SpaceKind::CrouzeixRaviart, 1);
  const Eigen::Vector2d c(1.0 / 3, 1.0 / 3);
  auto p0_column = [&](auto value) {
    Eigen::VectorXd col(3 * nt);
    for (int t = 0; t < nt; ++t) col.segment<3>(3 * t) = std::sqrt(mesh.area(t)) * value(t);
    return col;
  };
  std::vector<Eigen::VectorXd> rot_cols, grad_cols, harm_cols;
  for (int i = 0; i < S1.num_dofs(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(S1.num_dofs());
    e(i) = 1.0;
    const FeField f(S1, e);
    rot_cols.push_back(p0_column([&](int t) { return Vec3(-mesh.normal(t).cross(evaluate_scalar_gradient(f, t, c))); }));
  }
  for (int i = 0; i < CR.num_dofs(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(CR.num_dofs());
    e(i) = 1.0;
    const FeField f(CR, e);
    grad_cols.push_back(p0_column([&](int t) { return evaluate_scalar_gradient(f, t, c); }));
  }
  for (const Eigen::VectorXd& h : basis.fields) {
    const FeField f(ctx.V(), h);
    harm_cols.push_back(p0_column([&](int t) { return evaluate_vector(f, t, c); }));
  }
  auto stack = [](const std::vector<Eigen::VectorXd>& cols) {
    Eigen::MatrixXd A(cols[0].size(), cols.size());
    for (size_t i = 0; i < cols.size(); ++i) A.col(i) = cols[i];
    return A;
  };
  const Eigen::MatrixXd R = stack(rot_cols), G = stack(grad_cols), H = stack(harm_cols);
  CHECK(dense_rank(R) == topo.num_vertices - 1);
  CHECK(dense_rank(G) == topo.num_edges - 1);
  CHECK(dense_rank(H) == 2);
  CHECK((R.transpose() * G).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((R.transpose() * H).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((G.transpose() * H).cwiseAbs().maxCoeff() <= 1e-10);

  std::vector<Vec3> v(nt);
  for (int t = 0; t < nt; ++t) {
    const Vec3 x(gauss(rng), gauss(rng), gauss(rng));
    v[t] = x - x.dot(mesh.normal(t)) * mesh.normal(t);
  }
  const P0Decomposition d = decompose_p0_incomplete(ctx, basis, v);
  const double v2 = p0_inner(mesh, v, v);
  CHECK(std::abs(p0_inner(mesh, d.rot_part, d.harmonic_part)) <= 1e-10 * v2);
  CHECK(std::abs(p0_inner(mesh, d.rot_part, d.gradient_part)) <= 1e-10 * v2);
  CHECK(std::abs(p0_inner(mesh, d.gradient_part, d.harmonic_part)) <= 1e-10 * v2);
  CHECK(d.remainder_norm <= 1e-10 * std::sqrt(v2));

  const HodgeContext ctx1(mesh, 1);
  CHECK(error_code_of([&] { decompose_p0_incomplete(ctx1, harmonic_basis(ctx1), v); }) == Errc::WrongDegree);
}
