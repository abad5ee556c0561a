// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/output.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "surfhodge/error.hpp"

namespace surfhodge {

void write_vtk(std::ostream& out, const SurfaceMesh& mesh, const std::vector<CellVectors>& cell_vectors,
               const std::vector<PointScalars>& point_scalars, const std::string& title) {
  const int nv = mesh.num_vertices(), nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  out << std::setprecision(17);
  out << "POINTS " << nv << " double\n";
  for (const Vec3& p : mesh.positions()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  out << "POLYGONS " << nt << ' ' << 4 * nt << '\n';
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  if (!cell_vectors.empty()) {
    out << "CELL_DATA " << nt << '\n';
    for (const auto& [name, values] : cell_vectors) {
      if (static_cast<int>(values.size()) != nt)
        throw Error(Errc::DimensionMismatch, "cell field " + name + " has wrong length");
      out << "VECTORS " << name << " double\n";
      for (const Vec3& v : values) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
  }
  if (!point_scalars.empty()) {
    out << "POINT_DATA " << nv << '\n';
    for (const auto& [name, values] : point_scalars) {
      if (values.size() != nv) throw Error(Errc::DimensionMismatch, "point field " + name + " has wrong length");
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (int i = 0; i < nv; ++i) out << values(i) << '\n';
    }
  }
}

void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh,
               const std::vector<CellVectors>& cell_vectors, const std::vector<PointScalars>& point_scalars,
               const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_vtk(out, mesh, cell_vectors, point_scalars, title);
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

std::vector<Vec3> centroid_values(const FeField& u) {
  const int nt = u.space().mesh().num_triangles();
  std::vector<Vec3> out(nt);
  for (int t = 0; t < nt; ++t) out[t] = evaluate_vector(u, t, {1.0 / 3.0, 1.0 / 3.0});
  return out;
}

Eigen::VectorXd vertex_values(const FeField& f) {
  const SurfaceMesh& mesh = f.space().mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) out(mesh.triangle(t)[i]) = evaluate_scalar(f, t, reference_vertex(i));
  return out;
}

}  // namespace surfhodge
