// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "surfhodge/error.hpp"
#include "surfhodge/mesh.hpp"
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

SurfaceMesh mobius_strip(int n) {
  std::vector<Vec3> pos;
  for (int i = 0; i < n; ++i) {
    const double u = 2 * std::numbers::pi * i / n;
    for (int s = 0; s < 2; ++s) {
      const double w = s == 0 ? -0.3 : 0.3;
      pos.emplace_back((1 + w * std::cos(u / 2)) * std::cos(u), (1 + w * std::cos(u / 2)) * std::sin(u),
                       w * std::sin(u / 2));
    }
  }
  auto id = [n](int i, int s) {
    if (i == n) return 2 * 0 + (1 - s);
    return 2 * i + s;
  };
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n; ++i) {
    tris.push_back({id(i, 0), id(i + 1, 0), id(i + 1, 1)});
    tris.push_back({id(i, 0), id(i + 1, 1), id(i, 1)});
  }
  return SurfaceMesh(pos, tris);
}

void check_frames(const SurfaceMesh& mesh) {
  for (int t = 0; t < mesh.num_triangles(); ++t) CHECK(mesh.normal(t).norm() == doctest::Approx(1.0));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeFrame f = edge_frames(mesh, e);
    const Edge& edge = mesh.edge(e);
    CHECK(f.tau.norm() == doctest::Approx(1.0));
    CHECK(std::abs(f.nu1.dot(mesh.normal(edge.tri[0]))) < 1e-12);
    CHECK(std::abs(f.nu1.dot(f.tau)) < 1e-12);
    CHECK(f.nu1.norm() == doctest::Approx(1.0));
    // nu1 points out of tri[0]
    const Vec3 mid = 0.5 * (mesh.position(edge.v[0]) + mesh.position(edge.v[1]));
    CHECK(f.nu1.dot(mesh.centroid(edge.tri[0]) - mid) < 0.0);
    if (!edge.is_boundary()) {
      REQUIRE(f.nu2.has_value());
      CHECK(std::abs(f.nu2->dot(mesh.normal(edge.tri[1]))) < 1e-12);
      CHECK(std::abs(f.nu2->dot(f.tau)) < 1e-12);
      CHECK(f.nu2->dot(mesh.centroid(edge.tri[1]) - mid) < 0.0);
      const Vec3 nu_bar = 0.5 * (f.nu1 + *f.nu2);
      CHECK(nu_bar.norm() <= 1.0 + 1e-14);
    } else {
      CHECK_FALSE(f.nu2.has_value());
    }
  }
}

}  // namespace

TEST_CASE("tetrahedron OFF combinatorics") {
  std::istringstream in(
      "OFF\n# regular tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n");
  const SurfaceMesh mesh = read_off(in);
  CHECK(mesh.num_vertices() == 4);
  CHECK(mesh.num_edges() == 6);
  CHECK(mesh.num_triangles() == 4);
  const TopologySummary topo = analyze_topology(mesh);
  CHECK(topo.euler_characteristic == 2);
  CHECK(topo.b1 == 0);
  CHECK(topo.b2 == 1);
  CHECK(topo.closed());
  check_frames(mesh);
}

TEST_CASE("single triangle has one boundary loop of three edges") {
  std::istringstream in("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const SurfaceMesh mesh = read_off(in);
  const TopologySummary topo = analyze_topology(mesh);
  CHECK(topo.boundary_edges == 3);
  CHECK(topo.boundary_vertices == 3);
  CHECK(mesh.boundary_loops().size() == 1);
  CHECK(mesh.boundary_loops()[0].size() == 3);
  CHECK(topo.b1 == 0);
  check_frames(mesh);
}

TEST_CASE("3x3 structured torus through OBJ") {
  std::ostringstream out;
  write_obj(out, meshgen::torus(3, 3));
  std::istringstream in(out.str());
  const SurfaceMesh mesh = read_obj(in);
  // 9 grid points, 3 edge families x 9, 2 triangles per cell
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.num_edges() == 27);
  CHECK(mesh.num_triangles() == 18);
  const TopologySummary topo = analyze_topology(mesh);
  CHECK(topo.euler_characteristic == 0);
  CHECK(topo.b1 == 2);
  CHECK(mesh.is_closed());
  check_frames(mesh);
}

TEST_CASE("Betti numbers of the generated corpus") {
  CHECK(analyze_topology(meshgen::icosphere(1)).b1 == 0);
  CHECK(analyze_topology(meshgen::torus(8, 5)).b1 == 2);
  CHECK(analyze_topology(meshgen::genus_plate(1)).b1 == 2);
  CHECK(analyze_topology(meshgen::genus_plate(2)).b1 == 4);
  CHECK(analyze_topology(meshgen::genus_plate(3)).b1 == 6);
  const SurfaceMesh holed = meshgen::holed_sphere(2, 4);
  const TopologySummary topo = analyze_topology(holed);
  CHECK(topo.num_boundary_loops == 4);
  CHECK(topo.b1 == 3);
  CHECK(topo.boundary_edges == topo.boundary_vertices);
  CHECK(analyze_topology(meshgen::trefoil_tube(48, 6)).b1 == 2);
  check_frames(holed);
  check_frames(meshgen::genus_plate(2));
  check_frames(meshgen::trefoil_tube(48, 6));
}

TEST_CASE("coplanar and folded edge frames") {
  const SurfaceMesh flat = meshgen::unit_square_two_triangles();
  for (int e = 0; e < flat.num_edges(); ++e) {
    const EdgeFrame f = edge_frames(flat, e);
    if (f.nu2) CHECK((f.nu1 + *f.nu2).norm() < 1e-14);
  }
  // fold along the x axis: one triangle in z = 0, the other in y = 0
  const SurfaceMesh folded({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.3, 1, 0), Vec3(0.6, 0, 1)}, {{0, 1, 2}, {1, 0, 3}});
  int interior = 0;
  for (int e = 0; e < folded.num_edges(); ++e) {
    const EdgeFrame f = edge_frames(folded, e);
    if (!f.nu2) continue;
    ++interior;
    CHECK(std::abs(f.nu1.dot(*f.nu2)) < 1e-14);
    const Vec3 nu_bar = 0.5 * (f.nu1 + *f.nu2);
    CHECK(nu_bar.norm() < 1.0);
  }
  CHECK(interior == 1);
  check_frames(folded);
}

TEST_CASE("edge frame index validation") {
  const SurfaceMesh mesh = meshgen::single_triangle();
  CHECK(error_code_of([&] { edge_frames(mesh, 3); }) == Errc::IndexOutOfRange);
  CHECK(error_code_of([&] { edge_frames(mesh, -1); }) == Errc::IndexOutOfRange);
}

TEST_CASE("orientation repair flips inconsistent triangles") {
  const SurfaceMesh ref = meshgen::torus(6, 4);
  auto tris = ref.triangles();
  std::swap(tris[3][0], tris[3][1]);
  std::swap(tris[10][1], tris[10][2]);
  const SurfaceMesh repaired(ref.positions(), tris);
  CHECK(repaired.flipped_triangles() >= 1);
  const TopologySummary a = analyze_topology(ref), b = analyze_topology(repaired);
  CHECK(a.b1 == b.b1);
  CHECK(a.num_edges == b.num_edges);
  // every interior edge traversed in opposite directions
  for (const Edge& e : repaired.edges()) {
    const int d0 = repaired.edge_direction(e.tri[0], e.local[0]);
    const int d1 = repaired.edge_direction(e.tri[1], e.local[1]);
    CHECK(d0 == -d1);
    CHECK(d0 == -1);
  }
}

TEST_CASE("topology is invariant under vertex permutation") {
  const SurfaceMesh ref = meshgen::holed_sphere(2, 4);
  std::vector<int> perm(ref.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(7);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vec3> pos(ref.num_vertices());
  for (int v = 0; v < ref.num_vertices(); ++v) pos[perm[v]] = ref.position(v);
  auto tris = ref.triangles();
  for (auto& t : tris)
    for (int& v : t) v = perm[v];
  const SurfaceMesh permuted(pos, tris);
  const TopologySummary a = analyze_topology(ref), b = analyze_topology(permuted);
  CHECK(a.num_vertices == b.num_vertices);
  CHECK(a.num_edges == b.num_edges);
  CHECK(a.boundary_edges == b.boundary_edges);
  CHECK(a.interior_vertices == b.interior_vertices);
  CHECK(a.euler_characteristic == b.euler_characteristic);
  CHECK(a.num_boundary_loops == b.num_boundary_loops);
  CHECK(a.b1 == b.b1);
}

TEST_CASE("disconnected meshes sum Betti numbers per component") {
  const SurfaceMesh a = meshgen::torus(4, 3);
  const SurfaceMesh b = meshgen::tetrahedron();
  auto pos = a.positions();
  auto tris = a.triangles();
  const int off = static_cast<int>(pos.size());
  for (const auto& p : b.positions()) pos.push_back(p + Vec3(10, 0, 0));
  for (auto t : b.triangles()) tris.push_back({t[0] + off, t[1] + off, t[2] + off});
  const SurfaceMesh both(pos, tris);
  const TopologySummary topo = analyze_topology(both);
  CHECK(topo.num_components == 2);
  CHECK(topo.b0 == 2);
  CHECK(topo.b1 == 2);
  CHECK(topo.b2 == 2);
  CHECK(error_code_of([&] { require_connected(both); }) == Errc::DisconnectedMesh);
}

TEST_CASE("rejected inputs") {
  // three triangles on one edge
  CHECK(error_code_of([] {
          SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)},
                      {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
        }) == Errc::NonManifold);
  CHECK(error_code_of([] { mobius_strip(8); }) == Errc::NonOrientable);
  CHECK(error_code_of([] {
          std::istringstream in("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
          read_off(in);
        }) == Errc::NonTriangle);
  CHECK(error_code_of([] {
          std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
          read_obj(in);
        }) == Errc::NonTriangle);
  CHECK(error_code_of([] {
          std::istringstream in("OFF\n3 1 0\n0 0 zero\n1 0 0\n0 1 0\n3 0 1 2\n");
          read_off(in);
        }) == Errc::ParseError);
  CHECK(error_code_of([] {
          std::istringstream in("OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
          read_off(in);
        }) == Errc::ParseError);
  CHECK(error_code_of([] {
          std::istringstream in("PLY\n");
          read_off(in);
        }) == Errc::ParseError);
  CHECK(error_code_of([] {
          SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1, 2}});
        }) == Errc::DegenerateTriangle);
  CHECK(error_code_of([] { SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {{0, 1, 2}}); }) == Errc::IndexOutOfRange);
  CHECK(error_code_of([] { load_mesh("/nonexistent/file.off"); }) == Errc::IoError);
  CHECK(error_code_of([] { load_mesh("mesh.stl"); }) == Errc::ParseError);
}

TEST_CASE("OBJ face records with slashes and relative indices") {
  std::istringstream in(
      "# square\no square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
      "f 1/1/1 2/1/1 3/1/1\nf -4//1 -2//1 -1//1\n");
  const SurfaceMesh mesh = read_obj(in);
  CHECK(mesh.num_triangles() == 2);
  CHECK(mesh.num_edges() == 5);
  CHECK(mesh.total_area() == doctest::Approx(1.0));
}

TEST_CASE("unreferenced vertices are dropped") {
  const SurfaceMesh mesh({Vec3(5, 5, 5), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{1, 2, 3}});
  CHECK(mesh.num_vertices() == 3);
  CHECK(mesh.position(0).isApprox(Vec3(0, 0, 0)));
}

TEST_CASE("OFF round trip preserves geometry") {
  const SurfaceMesh ref = meshgen::trefoil_tube(30, 5);
  std::stringstream buf;
  write_off(buf, ref);
  const SurfaceMesh back = read_off(buf);
  REQUIRE(back.num_vertices() == ref.num_vertices());
  for (int v = 0; v < ref.num_vertices(); ++v) CHECK((back.position(v) - ref.position(v)).norm() == 0.0);
  CHECK(back.total_area() == doctest::Approx(ref.total_area()).epsilon(1e-14));
}

TEST_CASE("synthetic topology from counts") {
  const TopologySummary t = make_topology(1745, 5235, 3490);
  CHECK(t.euler_characteristic == 0);
  CHECK(t.b1 == 2);
}
