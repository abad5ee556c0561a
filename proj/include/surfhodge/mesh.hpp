// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surfhodge {

using Vec3 = Eigen::Vector3d;

/// Edge with endpoints stored as (lower, higher) global vertex index.
///
/// `tri[0]` is the triangle that traverses the edge from the higher to the
/// lower vertex, so that `n(tri[0]) x tau` points out of it. For boundary
/// edges `tri[1] == -1`.
struct Edge {
  std::array<int, 2> v{-1, -1};
  std::array<int, 2> tri{-1, -1};
  std::array<int, 2> local{-1, -1};  // local edge index inside tri[i]

  bool is_boundary() const { return tri[1] < 0; }
};

/// Unit tangent and outward side co-normals of an edge. `nu2` is empty on
/// boundary edges, where `nu1` is the outward boundary co-normal.
struct EdgeFrame {
  Vec3 tau;
  Vec3 nu1;
  std::optional<Vec3> nu2;
};

/// Oriented manifold triangle surface in R^3. Immutable after construction.
///
/// Local edge i of a triangle is opposite local vertex i and runs from
/// vertex (i+1)%3 to (i+2)%3.
class SurfaceMesh {
 public:
  SurfaceMesh(std::vector<Vec3> positions, std::vector<std::array<int, 3>> triangles);

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }

  const Vec3& position(int v) const { return positions_[v]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  /// Global edge of local edge i (opposite local vertex i).
  int triangle_edge(int t, int i) const { return tri_edges_[t][i]; }
  /// +1 if local edge i of t runs from lower to higher global vertex.
  int edge_direction(int t, int i) const { return tri_edge_dir_[t][i]; }

  const Vec3& normal(int t) const { return normals_[t]; }
  double area(int t) const { return areas_[t]; }
  double total_area() const;
  double edge_length(int e) const;
  Vec3 centroid(int t) const;

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  bool is_closed() const { return boundary_loops_.empty(); }
  /// Closed cycles of vertices, traversed along triangle orientation.
  const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }

  /// Component id per triangle, and number of components.
  const std::vector<int>& triangle_component() const { return tri_component_; }
  int num_components() const { return num_components_; }

  /// Number of triangles whose orientation was flipped during construction.
  int flipped_triangles() const { return flipped_; }

  double bounding_box_diagonal() const;
  double min_edge_length() const;

 private:
  void orient();
  void build_edges();
  void build_geometry();
  void build_boundary_loops();

  std::vector<Vec3> positions_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_edge_dir_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::vector<char> boundary_vertex_;
  std::vector<std::vector<int>> boundary_loops_;
  std::vector<int> tri_component_;
  int num_components_ = 0;
  int flipped_ = 0;
};

struct TopologySummary {
  int num_vertices = 0;
  int num_edges = 0;
  int num_triangles = 0;
  int interior_vertices = 0;
  int boundary_vertices = 0;
  int interior_edges = 0;
  int boundary_edges = 0;
  int num_components = 1;
  int num_boundary_loops = 0;
  int euler_characteristic = 0;
  int b0 = 1;
  int b1 = 0;
  int b2 = 1;

  bool closed() const { return boundary_edges == 0; }
};

/// Counts and Betti numbers. Components are analysed individually and their
/// Betti numbers summed.
TopologySummary analyze_topology(const SurfaceMesh& mesh);

/// Synthetic summary of a single closed or bordered component from raw counts.
TopologySummary make_topology(int nv, int ne, int nt, int boundary_vertices = 0,
                              int boundary_edges = 0);

EdgeFrame edge_frames(const SurfaceMesh& mesh, int edge);

enum class MeshFormat { OFF, OBJ };

SurfaceMesh read_off(std::istream& in);
SurfaceMesh read_obj(std::istream& in);
SurfaceMesh load_mesh(const std::filesystem::path& path);
SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format);

void write_off(std::ostream& out, const SurfaceMesh& mesh);
void write_obj(std::ostream& out, const SurfaceMesh& mesh);
void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh);

/// Throws DisconnectedMesh unless the mesh has exactly one component.
void require_connected(const SurfaceMesh& mesh);

/// 64-bit FNV-1a over vertex coordinates and triangle indices.
std::uint64_t mesh_checksum(const SurfaceMesh& mesh);

}  // namespace surfhodge
