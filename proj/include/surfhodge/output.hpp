// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "surfhodge/fespace.hpp"

namespace surfhodge {

using CellVectors = std::pair<std::string, std::vector<Vec3>>;
using PointScalars = std::pair<std::string, Eigen::VectorXd>;

/// Legacy ASCII VTK unstructured grid: POINTS, POLYGONS, CELL_DATA vectors
/// and POINT_DATA scalars.
void write_vtk(std::ostream& out, const SurfaceMesh& mesh, const std::vector<CellVectors>& cell_vectors,
               const std::vector<PointScalars>& point_scalars, const std::string& title = "surfhodge");
void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh,
               const std::vector<CellVectors>& cell_vectors, const std::vector<PointScalars>& point_scalars,
               const std::string& title = "surfhodge");

/// Vector field values at triangle centroids.
std::vector<Vec3> centroid_values(const FeField& u);
/// Scalar field values at mesh vertices.
Eigen::VectorXd vertex_values(const FeField& f);

}  // namespace surfhodge
