// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

// OFF / OBJ readers and writers. The accepted grammar is documented in
// docs/file_formats.md.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "surfhodge/error.hpp"
#include "surfhodge/mesh.hpp"

namespace surfhodge {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

long parse_int(const std::string& tok, int line_no) {
  long value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected integer, got '" + tok + "'");
  return value;
}

double parse_double(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected number, got '" + tok + "'");
  }
}

}  // namespace

SurfaceMesh read_off(std::istream& in) {
  // Gather non-empty, comment-stripped lines first.
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto toks = split(strip_comment(raw));
    if (!toks.empty()) lines.emplace_back(line_no, std::move(toks));
  }
  if (lines.empty()) throw Error(Errc::ParseError, "empty OFF file");

  std::size_t cursor = 0;
  auto header = lines[cursor].second;
  if (header[0] != "OFF") throw Error(Errc::ParseError, "missing OFF header");
  std::vector<std::string> counts(header.begin() + 1, header.end());
  ++cursor;
  if (counts.empty()) {
    if (cursor >= lines.size()) throw Error(Errc::ParseError, "missing counts line");
    counts = lines[cursor].second;
    ++cursor;
  }
  if (counts.size() < 2) throw Error(Errc::ParseError, "counts line needs vertex and face counts");
  const long nv = parse_int(counts[0], lines[cursor - 1].first);
  const long nf = parse_int(counts[1], lines[cursor - 1].first);
  if (nv < 0 || nf < 0) throw Error(Errc::ParseError, "negative counts");
  if (lines.size() < cursor + static_cast<std::size_t>(nv + nf))
    throw Error(Errc::ParseError, "file ends before all vertices and faces were read");

  std::vector<Vec3> pos;
  pos.reserve(nv);
  for (long i = 0; i < nv; ++i, ++cursor) {
    const auto& [no, toks] = lines[cursor];
    if (toks.size() < 3) throw Error(Errc::ParseError, "line " + std::to_string(no) + ": vertex needs 3 coordinates");
    pos.emplace_back(parse_double(toks[0], no), parse_double(toks[1], no), parse_double(toks[2], no));
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(nf);
  for (long i = 0; i < nf; ++i, ++cursor) {
    const auto& [no, toks] = lines[cursor];
    const long n = parse_int(toks[0], no);
    if (n != 3) throw Error(Errc::NonTriangle, "line " + std::to_string(no) + ": face with " + std::to_string(n) + " vertices");
    if (toks.size() < 4) throw Error(Errc::ParseError, "line " + std::to_string(no) + ": truncated face");
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      const long idx = parse_int(toks[1 + k], no);
      if (idx < 0 || idx >= nv) throw Error(Errc::ParseError, "line " + std::to_string(no) + ": vertex index out of range");
      t[k] = static_cast<int>(idx);
    }
    tris.push_back(t);
  }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh read_obj(std::istream& in) {
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> tris;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto toks = split(strip_comment(raw));
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      pos.emplace_back(parse_double(toks[1], line_no), parse_double(toks[2], line_no), parse_double(toks[3], line_no));
    } else if (toks[0] == "f") {
      const std::size_t n = toks.size() - 1;
      if (n != 3) throw Error(Errc::NonTriangle, "line " + std::to_string(line_no) + ": face with " + std::to_string(n) + " vertices");
      std::array<int, 3> t{};
      for (int k = 0; k < 3; ++k) {
        const std::string& tok = toks[1 + k];
        const long idx = parse_int(tok.substr(0, tok.find('/')), line_no);
        const long resolved = idx > 0 ? idx - 1 : static_cast<long>(pos.size()) + idx;
        if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(pos.size()))
          throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": vertex index out of range");
        t[k] = static_cast<int>(resolved);
      }
      tris.push_back(t);
    }
    // every other record (vn, vt, g, o, s, usemtl, ...) is ignored
  }
  return SurfaceMesh(std::move(pos), std::move(tris));
}

SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return format == MeshFormat::OFF ? read_off(in) : read_obj(in);
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return load_mesh(path, MeshFormat::OFF);
  if (ext == ".obj") return load_mesh(path, MeshFormat::OBJ);
  throw Error(Errc::ParseError, "unknown mesh extension '" + ext + "'");
}

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
  out << std::setprecision(17);
  for (const auto& p : mesh.positions()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_obj(std::ostream& out, const SurfaceMesh& mesh) {
  out << std::setprecision(17);
  for (const auto& p : mesh.positions()) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj")
    write_obj(out, mesh);
  else
    write_off(out, mesh);
}

}  // namespace surfhodge
