// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "surfhodge/mesh.hpp"

// Small procedural surfaces used by the test corpus, the acceptance suite and
// the demo configurations.
namespace surfhodge::meshgen {

SurfaceMesh single_triangle();
/// Unit square [0,1]^2 split along the diagonal (0,0)-(1,1).
SurfaceMesh unit_square_two_triangles();
/// nx-by-ny structured grid of the unit square in the z = 0 plane.
SurfaceMesh flat_grid(int nx, int ny);
SurfaceMesh tetrahedron();
SurfaceMesh icosphere(int subdivisions, double radius = 1.0);
/// Torus of revolution with n_major x n_minor quads, each split in two.
SurfaceMesh torus(int n_major, int n_minor, double major_radius = 3.0, double minor_radius = 1.0);
/// Boundary surface of a union of unit voxels.
SurfaceMesh voxel_surface(const std::vector<std::array<int, 3>>& cells);
/// Closed genus-g surface: a (2g+1) x 3 x 1 voxel plate with g square holes.
SurfaceMesh genus_plate(int genus);
/// Icosphere with the vertex stars around `holes` well separated directions removed.
SurfaceMesh holed_sphere(int subdivisions, int holes);
/// Tube of radius `tube_radius` around a trefoil knot scaled into [0,100]^3.
SurfaceMesh trefoil_tube(int n_along, int n_around, double tube_radius = 5.0);

}  // namespace surfhodge::meshgen
