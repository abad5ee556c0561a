// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <Eigen/Geometry>

#include "surfhodge/error.hpp"

namespace surfhodge {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// true if triangle tri traverses a -> b
bool traverses(const std::array<int, 3>& tri, int a, int b) {
  for (int i = 0; i < 3; ++i)
    if (tri[i] == a && tri[(i + 1) % 3] == b) return true;
  return false;
}

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> positions, std::vector<std::array<int, 3>> triangles)
    : positions_(std::move(positions)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw Error(Errc::ParseError, "mesh has no triangles");
  const int nv = static_cast<int>(positions_.size());
  std::vector<char> used(nv, 0);
  for (const auto& t : triangles_) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw Error(Errc::IndexOutOfRange, "triangle references vertex " + std::to_string(v));
      used[v] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(Errc::DegenerateTriangle, "triangle with repeated vertex");
  }
  // Drop unreferenced vertices, keeping the relative order of the others.
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    std::vector<int> remap(nv, -1);
    std::vector<Vec3> kept;
    for (int v = 0; v < nv; ++v)
      if (used[v]) {
        remap[v] = static_cast<int>(kept.size());
        kept.push_back(positions_[v]);
      }
    positions_ = std::move(kept);
    for (auto& t : triangles_)
      for (int& v : t) v = remap[v];
  }
  orient();
  build_edges();
  build_geometry();
  build_boundary_loops();
}

void SurfaceMesh::orient() {
  const int nt = num_triangles();
  std::unordered_map<std::uint64_t, std::vector<int>> edge_tris;
  edge_tris.reserve(3 * nt);
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      auto& list = edge_tris[edge_key(triangles_[t][(i + 1) % 3], triangles_[t][(i + 2) % 3])];
      list.push_back(t);
      if (list.size() > 2) throw Error(Errc::NonManifold, "edge shared by more than two triangles");
    }

  tri_component_.assign(nt, -1);
  num_components_ = 0;
  flipped_ = 0;
  std::deque<int> queue;
  for (int seed = 0; seed < nt; ++seed) {
    if (tri_component_[seed] >= 0) continue;
    const int comp = num_components_++;
    tri_component_[seed] = comp;
    queue.push_back(seed);
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (int i = 0; i < 3; ++i) {
        const int a = triangles_[t][(i + 1) % 3];
        const int b = triangles_[t][(i + 2) % 3];
        for (int s : edge_tris[edge_key(a, b)]) {
          if (s == t) continue;
          // consistent orientation: s must traverse b -> a
          const bool consistent = traverses(triangles_[s], b, a);
          if (tri_component_[s] < 0) {
            tri_component_[s] = comp;
            if (!consistent) {
              std::swap(triangles_[s][1], triangles_[s][2]);
              ++flipped_;
            }
            queue.push_back(s);
          } else if (!consistent) {
            throw Error(Errc::NonOrientable, "no consistent orientation exists");
          }
        }
      }
    }
  }
}

void SurfaceMesh::build_edges() {
  const int nt = num_triangles();
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(3 * nt);
  tri_edges_.assign(nt, {-1, -1, -1});
  tri_edge_dir_.assign(nt, {0, 0, 0});
  edges_.clear();
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = triangles_[t][(i + 1) % 3];
      const int b = triangles_[t][(i + 2) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v = {std::min(a, b), std::max(a, b)};
        edges_.push_back(e);
      }
      Edge& e = edges_[it->second];
      const int slot = e.tri[0] < 0 ? 0 : 1;
      e.tri[slot] = t;
      e.local[slot] = i;
      tri_edges_[t][i] = it->second;
      tri_edge_dir_[t][i] = a < b ? 1 : -1;
    }
  }
  // tri[0] must traverse high -> low on interior edges.
  for (auto& e : edges_) {
    if (e.tri[1] < 0) continue;
    if (tri_edge_dir_[e.tri[0]][e.local[0]] > 0) {
      std::swap(e.tri[0], e.tri[1]);
      std::swap(e.local[0], e.local[1]);
    }
  }
}

void SurfaceMesh::build_geometry() {
  const int nt = num_triangles();
  normals_.resize(nt);
  areas_.resize(nt);
  const double diag = bounding_box_diagonal();
  const double min_area = 1e-12 * diag * diag;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    const Vec3 c = (positions_[tri[1]] - positions_[tri[0]]).cross(positions_[tri[2]] - positions_[tri[0]]);
    const double twice_area = c.norm();
    if (!(0.5 * twice_area > min_area))
      throw Error(Errc::DegenerateTriangle, "triangle " + std::to_string(t) + " has (near) zero area");
    normals_[t] = c / twice_area;
    areas_[t] = 0.5 * twice_area;
  }
}

void SurfaceMesh::build_boundary_loops() {
  boundary_vertex_.assign(num_vertices(), 0);
  boundary_loops_.clear();
  // next vertex along the boundary, following triangle orientation
  std::unordered_map<int, int> next;
  for (const auto& e : edges_) {
    if (!e.is_boundary()) continue;
    const auto& tri = triangles_[e.tri[0]];
    const int a = tri[(e.local[0] + 1) % 3];
    const int b = tri[(e.local[0] + 2) % 3];
    if (!next.emplace(a, b).second)
      throw Error(Errc::NonManifold, "boundary vertex " + std::to_string(a) + " is not manifold");
    boundary_vertex_[a] = 1;
    boundary_vertex_[b] = 1;
  }
  std::unordered_map<int, char> visited;
  std::vector<int> starts;
  for (const auto& [a, b] : next) starts.push_back(a);
  std::sort(starts.begin(), starts.end());
  for (int start : starts) {
    if (visited.count(start)) continue;
    std::vector<int> loop;
    int v = start;
    while (!visited.count(v)) {
      visited[v] = 1;
      loop.push_back(v);
      auto it = next.find(v);
      if (it == next.end()) throw Error(Errc::NonManifold, "open boundary chain");
      v = it->second;
    }
    if (v != start) throw Error(Errc::NonManifold, "boundary loops are not simple");
    boundary_loops_.push_back(std::move(loop));
  }
}

double SurfaceMesh::total_area() const {
  return std::accumulate(areas_.begin(), areas_.end(), 0.0);
}

double SurfaceMesh::edge_length(int e) const {
  return (positions_[edges_[e].v[1]] - positions_[edges_[e].v[0]]).norm();
}

Vec3 SurfaceMesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (positions_[tri[0]] + positions_[tri[1]] + positions_[tri[2]]) / 3.0;
}

double SurfaceMesh::bounding_box_diagonal() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double SurfaceMesh::min_edge_length() const {
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_edges(); ++e) h = std::min(h, edge_length(e));
  return h;
}

TopologySummary make_topology(int nv, int ne, int nt, int boundary_vertices, int boundary_edges) {
  TopologySummary s;
  s.num_vertices = nv;
  s.num_edges = ne;
  s.num_triangles = nt;
  s.boundary_vertices = boundary_vertices;
  s.interior_vertices = nv - boundary_vertices;
  s.boundary_edges = boundary_edges;
  s.interior_edges = ne - boundary_edges;
  s.euler_characteristic = nv - ne + nt;
  s.num_components = 1;
  s.b0 = 1;
  s.b2 = boundary_edges == 0 ? 1 : 0;
  s.b1 = s.b0 + s.b2 - s.euler_characteristic;
  return s;
}

TopologySummary analyze_topology(const SurfaceMesh& mesh) {
  TopologySummary s;
  s.num_vertices = mesh.num_vertices();
  s.num_edges = mesh.num_edges();
  s.num_triangles = mesh.num_triangles();
  for (int v = 0; v < mesh.num_vertices(); ++v) s.boundary_vertices += mesh.is_boundary_vertex(v) ? 1 : 0;
  s.interior_vertices = s.num_vertices - s.boundary_vertices;
  for (const auto& e : mesh.edges()) s.boundary_edges += e.is_boundary() ? 1 : 0;
  s.interior_edges = s.num_edges - s.boundary_edges;
  s.num_boundary_loops = static_cast<int>(mesh.boundary_loops().size());
  s.euler_characteristic = s.num_vertices - s.num_edges + s.num_triangles;
  s.num_components = mesh.num_components();

  // per-component Euler characteristic and boundary presence
  const int nc = mesh.num_components();
  const auto& comp = mesh.triangle_component();
  std::vector<int> chi(nc, 0);
  std::vector<char> has_boundary(nc, 0);
  std::vector<int> vertex_comp(mesh.num_vertices(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    chi[comp[t]] += 1;
    for (int v : mesh.triangle(t)) vertex_comp[v] = comp[t];
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) chi[vertex_comp[v]] += 1;
  for (const auto& e : mesh.edges()) {
    chi[comp[e.tri[0]]] -= 1;
    if (e.is_boundary()) has_boundary[comp[e.tri[0]]] = 1;
  }
  s.b0 = nc;
  s.b1 = 0;
  s.b2 = 0;
  for (int c = 0; c < nc; ++c) {
    const int b2 = has_boundary[c] ? 0 : 1;
    s.b2 += b2;
    s.b1 += 1 + b2 - chi[c];
  }
  return s;
}

EdgeFrame edge_frames(const SurfaceMesh& mesh, int edge) {
  if (edge < 0 || edge >= mesh.num_edges())
    throw Error(Errc::IndexOutOfRange, "edge index " + std::to_string(edge));
  const Edge& e = mesh.edge(edge);
  EdgeFrame f;
  f.tau = (mesh.position(e.v[1]) - mesh.position(e.v[0])).normalized();
  f.nu1 = mesh.normal(e.tri[0]).cross(f.tau);
  if (e.is_boundary()) {
    // outward: away from the opposite vertex
    const Vec3 mid = 0.5 * (mesh.position(e.v[0]) + mesh.position(e.v[1]));
    if (f.nu1.dot(mesh.centroid(e.tri[0]) - mid) > 0) f.nu1 = -f.nu1;
  } else {
    f.nu2 = -mesh.normal(e.tri[1]).cross(f.tau);
  }
  return f;
}

void require_connected(const SurfaceMesh& mesh) {
  if (mesh.num_components() != 1)
    throw Error(Errc::DisconnectedMesh,
                "mesh has " + std::to_string(mesh.num_components()) + " components; a single one is required");
}

std::uint64_t mesh_checksum(const SurfaceMesh& mesh) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const Vec3& p : mesh.positions()) feed(p.data(), 3 * sizeof(double));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangle(t)) {
      const std::int64_t idx = v;
      feed(&idx, sizeof(idx));
    }
  }
  return h;
}

}  // namespace surfhodge
