// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/Geometry>

namespace surfhodge::meshgen {

using std::numbers::pi;

SurfaceMesh single_triangle() {
  return SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
}

SurfaceMesh unit_square_two_triangles() {
  return SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, {{0, 1, 2}, {0, 2, 3}});
}

SurfaceMesh flat_grid(int nx, int ny) {
  std::vector<Vec3> pos;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) pos.emplace_back(double(i) / nx, double(j) / ny, 0.0);
  std::vector<std::array<int, 3>> tris;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh tetrahedron() {
  return SurfaceMesh({Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)},
                     {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

SurfaceMesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : pos) p.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pos.push_back((pos[a] + pos[b]).normalized());
      const int id = static_cast<int>(pos.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& tr : tris) {
      const int a = midpoint(tr[0], tr[1]), b = midpoint(tr[1], tr[2]), c = midpoint(tr[2], tr[0]);
      next.push_back({tr[0], a, c});
      next.push_back({tr[1], b, a});
      next.push_back({tr[2], c, b});
      next.push_back({a, b, c});
    }
    tris = std::move(next);
  }
  for (auto& p : pos) p *= radius;
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh torus(int n_major, int n_minor, double major_radius, double minor_radius) {
  std::vector<Vec3> pos;
  for (int i = 0; i < n_major; ++i) {
    const double u = 2 * pi * i / n_major;
    for (int j = 0; j < n_minor; ++j) {
      const double v = 2 * pi * j / n_minor;
      const double rho = major_radius + minor_radius * std::cos(v);
      pos.emplace_back(rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return (i % n_major) * n_minor + (j % n_minor); };
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n_major; ++i)
    for (int j = 0; j < n_minor; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh voxel_surface(const std::vector<std::array<int, 3>>& cells) {
  std::set<std::array<int, 3>> occupied(cells.begin(), cells.end());
  std::map<std::array<int, 3>, int> vertex_id;
  std::vector<Vec3> pos;
  auto vid = [&](const std::array<int, 3>& p) {
    auto [it, inserted] = vertex_id.try_emplace(p, static_cast<int>(pos.size()));
    if (inserted) pos.emplace_back(p[0], p[1], p[2]);
    return it->second;
  };
  std::vector<std::array<int, 3>> tris;
  for (const auto& c : occupied) {
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        auto nb = c;
        nb[axis] += side ? 1 : -1;
        if (occupied.count(nb)) continue;
        const int u = (axis + 1) % 3, w = (axis + 2) % 3;
        std::array<std::array<int, 3>, 4> q;
        for (int k = 0; k < 4; ++k) {
          q[k] = c;
          q[k][axis] += side;
        }
        q[1][u] += 1;
        q[2][u] += 1;
        q[2][w] += 1;
        q[3][w] += 1;
        std::array<int, 4> ids{vid(q[0]), vid(q[1]), vid(q[2]), vid(q[3])};
        // (u, w, axis) is a right-handed cyclic frame, so this winding points to +axis
        if (side == 0) std::swap(ids[1], ids[3]);
        tris.push_back({ids[0], ids[1], ids[2]});
        tris.push_back({ids[0], ids[2], ids[3]});
      }
  }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh genus_plate(int genus) {
  std::vector<std::array<int, 3>> cells;
  for (int i = 0; i < 2 * genus + 1; ++i)
    for (int j = 0; j < 3; ++j) {
      if (j == 1 && i % 2 == 1) continue;
      cells.push_back({i, j, 0});
    }
  return voxel_surface(cells);
}

SurfaceMesh holed_sphere(int subdivisions, int holes) {
  SurfaceMesh sphere = icosphere(subdivisions);
  const std::vector<Vec3> dirs = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1),
                                  Vec3(0, 0, 1), Vec3(0, 0, -1)};
  std::set<int> removed_vertices;
  for (int h = 0; h < holes && h < static_cast<int>(dirs.size()); ++h) {
    const Vec3 d = dirs[h].normalized();
    int best = 0;
    for (int v = 1; v < sphere.num_vertices(); ++v)
      if (sphere.position(v).dot(d) > sphere.position(best).dot(d)) best = v;
    removed_vertices.insert(best);
  }
  std::vector<std::array<int, 3>> tris;
  for (const auto& t : sphere.triangles())
    if (!removed_vertices.count(t[0]) && !removed_vertices.count(t[1]) && !removed_vertices.count(t[2]))
      tris.push_back(t);
  return SurfaceMesh(sphere.positions(), std::move(tris));
}

SurfaceMesh trefoil_tube(int n_along, int n_around, double tube_radius) {
  auto curve = [](double s) {
    return Vec3(std::sin(s) + 2 * std::sin(2 * s), std::cos(s) - 2 * std::cos(2 * s), -std::sin(3 * s));
  };
  const double scale = 14.0;
  const Vec3 shift(50, 50, 50);
  std::vector<Vec3> centre(n_along), tangent(n_along);
  for (int i = 0; i < n_along; ++i) {
    const double s = 2 * pi * i / n_along;
    centre[i] = shift + scale * curve(s);
    tangent[i] = (curve(s + 1e-5) - curve(s - 1e-5)).normalized();
  }
  // parallel transport of a normal around the loop, then spread the holonomy
  std::vector<Vec3> normal(n_along + 1);
  Vec3 seed = tangent[0].cross(Vec3(0, 0, 1));
  if (seed.norm() < 1e-6) seed = tangent[0].cross(Vec3(1, 0, 0));
  normal[0] = seed.normalized();
  for (int i = 1; i <= n_along; ++i) {
    const Vec3& t = tangent[i % n_along];
    normal[i] = (normal[i - 1] - normal[i - 1].dot(t) * t).normalized();
  }
  const Vec3& t0 = tangent[0];
  const double mismatch = std::atan2(t0.dot(normal[0].cross(normal[n_along])), normal[0].dot(normal[n_along]));
  std::vector<Vec3> pos;
  for (int i = 0; i < n_along; ++i) {
    const Vec3& t = tangent[i];
    const double angle = -mismatch * i / n_along;
    const Vec3 n = Eigen::AngleAxisd(angle, t) * normal[i];
    const Vec3 b = t.cross(n);
    for (int j = 0; j < n_around; ++j) {
      const double phi = 2 * pi * j / n_around;
      pos.push_back(centre[i] + tube_radius * (std::cos(phi) * n + std::sin(phi) * b));
    }
  }
  auto id = [&](int i, int j) { return (i % n_along) * n_around + (j % n_around); };
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n_along; ++i)
    for (int j = 0; j < n_around; ++j) {
      tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
    }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

}  // namespace surfhodge::meshgen
