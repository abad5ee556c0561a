// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

// Writes the procedural mesh corpus used by the demo configurations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>

#include "surfhodge/error.hpp"
#include "surfhodge/meshgen.hpp"

namespace fs = std::filesystem;
using namespace surfhodge;

namespace {

// OFF file of a mesh with the first triangle's orientation reversed.
void write_flipped(const fs::path& path, const SurfaceMesh& mesh) {
  std::ofstream out(path);
  out.precision(17);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  for (const auto& p : mesh.positions()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto tri = mesh.triangle(t);
    if (t == 0) std::swap(tri[1], tri[2]);
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2 || std::string(argv[1]) == "--help") {
    std::cerr << "usage: surfhodge_corpus <directory>\n";
    return argc == 2 ? 0 : 2;
  }
  const fs::path dir(argv[1]);
  try {
    fs::create_directories(dir);
    const std::pair<const char*, SurfaceMesh> meshes[] = {
        {"tetrahedron.off", meshgen::tetrahedron()},
        {"icosphere.off", meshgen::icosphere(1)},
        {"torus.obj", meshgen::torus(6, 4)},
        {"genus2.off", meshgen::genus_plate(2)},
        {"holed_sphere.off", meshgen::holed_sphere(2, 4)},
        {"trefoil.obj", meshgen::trefoil_tube(24, 4)},
        {"flat_patch.off", meshgen::flat_grid(4, 4)},
    };
    for (const auto& [name, mesh] : meshes) {
      save_mesh(dir / name, mesh);
      std::cout << (dir / name).string() << '\n';
    }
    write_flipped(dir / "torus_flipped.off", meshgen::torus(5, 3));
    std::cout << (dir / "torus_flipped.off").string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
