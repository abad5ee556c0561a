// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "surfhodge/assembly.hpp"
#include "surfhodge/cli.hpp"
#include "surfhodge/hodge.hpp"
#include "surfhodge/meshgen.hpp"

using namespace surfhodge;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("surfhodge_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// JSON object printed last on stdout.
Json last_json(const std::string& out) { return Json::parse(out.substr(out.find('{'))); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

double eval(const std::string& text, const Vec3& x = Vec3::Zero(), double t = 0.0) {
  return Expression::parse(text)(x, t);
}

Eigen::MatrixXd projector(const HarmonicBasis& b, const SparseMatrix& M) {
  const Eigen::MatrixXd H = b.matrix();
  return H * (H.transpose() * M);
}

}  // namespace

TEST_CASE("expression arithmetic and precedence") {
  CHECK(eval("2 + 3 * 4") == 14.0);
  CHECK(eval("(2 + 3) * 4") == 20.0);
  CHECK(eval("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval("-2 ^ 2") == -4.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("1 - 2 - 3") == -4.0);
  CHECK(eval("1.5e2") == 150.0);
  CHECK(eval("--3") == 3.0);
  CHECK(eval("pi") == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(eval("x + 2*y - z", Vec3(1, 2, 3)) == 2.0);
  CHECK(eval("t * t", Vec3::Zero(), 3.0) == 9.0);
}

TEST_CASE("expression functions and comparisons") {
  CHECK(eval("sin(pi / 2)") == doctest::Approx(1.0));
  CHECK(eval("sqrt(16) + abs(-2)") == 6.0);
  CHECK(eval("atan2(1, 1)") == doctest::Approx(M_PI / 4));
  CHECK(eval("max(2, min(5, 3))") == 3.0);
  CHECK(eval("pow(2, 10)") == 1024.0);
  CHECK(eval("step(0)") == 1.0);
  CHECK(eval("step(-1e-300)") == 0.0);
  CHECK(eval("x < 40", Vec3(39, 0, 0)) == 1.0);
  CHECK(eval("x < 40", Vec3(40, 0, 0)) == 0.0);
  CHECK(eval("x <= 40", Vec3(40, 0, 0)) == 1.0);
  CHECK(eval("1 + (x > 0) * 2", Vec3(1, 0, 0)) == 3.0);
  CHECK(Expression::parse("x*cos(t)").uses_time());
  CHECK_FALSE(Expression::parse("x*cos(y)").uses_time());
}

TEST_CASE("expression errors") {
  for (const char* bad : {"", "1 +", "(1", "1)", "foo", "sin(1", "max(1)", "bar(2)", "2 $ 3", "x y"}) {
    CAPTURE(bad);
    try {
      Expression::parse(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ConfigError);
    }
  }
}

TEST_CASE("key value files") {
  std::istringstream in("# comment\n  mu = 0.5   # trailing\n\nk=2\nforcing.fx = x * (y + 1)\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(kv.size() == 3);
  CHECK(kv.at("mu") == "0.5");
  CHECK(kv.at("k") == "2");
  CHECK(kv.at("forcing.fx") == "x * (y + 1)");

  std::istringstream dup("k = 1\nk = 2\n");
  CHECK_THROWS_AS(parse_key_values(dup), Error);
  std::istringstream noeq("k 1\n");
  CHECK_THROWS_AS(parse_key_values(noeq), Error);
}

TEST_CASE("run config typing") {
  KeyValues kv{{"mesh", "meshes/a.off"},   {"k", "2"},          {"mu", "0.25"},
               {"wall", "free-slip"},      {"seed", "7"},       {"forcing", "constant-band"},
               {"forcing.axis", "y"},      {"forcing.upper", "1.5"}, {"forcing.direction", "1, 0, 0"},
               {"compare_saddle", "yes"}};
  const RunConfig c = parse_run_config(kv, "/data");
  CHECK(c.mesh == fs::path("/data/meshes/a.off"));
  CHECK(c.flow.k == 2);
  CHECK(c.flow.mu == 0.25);
  CHECK(c.flow.wall == WallCondition::FreeSlip);
  CHECK(c.flow.seed == 7);
  CHECK(c.forcing.kind == ForcingKind::ConstantBand);
  CHECK(c.forcing.axis == 1);
  CHECK(c.forcing.upper == 1.5);
  CHECK(c.forcing.direction == Vec3(1, 0, 0));
  CHECK(c.compare_saddle);

  SUBCASE("snapshot round trip") {
    const KeyValues snap = to_key_values(c);
    CHECK(to_key_values(parse_run_config(snap)) == snap);
    CHECK(snap.size() == config_schema().size());
    for (const auto& [key, doc] : config_schema()) CHECK(snap.count(key) == 1);
  }

  auto rejects = [](const KeyValues& bad, Errc code) {
    try {
      parse_run_config(bad);
      return false;
    } catch (const Error& e) {
      return e.code() == code;
    }
  };
  CHECK(rejects({{"viscosity", "1"}}, Errc::ConfigError));
  CHECK(rejects({{"k", "one"}}, Errc::ConfigError));
  CHECK(rejects({{"mu", "0.1x"}}, Errc::ConfigError));
  CHECK(rejects({{"wall", "sticky"}}, Errc::ConfigError));
  CHECK(rejects({{"forcing.direction", "1,2"}}, Errc::ConfigError));
  CHECK(rejects({{"dt", "0"}}, Errc::NonpositiveParameter));
  CHECK(rejects({{"mu", "0"}}, Errc::ConfigError));
  CHECK(rejects({{"forcing", "expression"}, {"forcing.fx", "x +"}}, Errc::ConfigError));
  CHECK_NOTHROW(parse_run_config({{"mu", "0"}, {"allow_inviscid", "true"}}));
}

TEST_CASE("forcing presets") {
  ForcingConfig band;
  band.kind = ForcingKind::ConstantBand;
  band.amplitude = 4e-5;
  band.axis = 0;
  band.upper = 40;
  const Forcing f(band);
  CHECK(f(Vec3(39.9, 5, 5), 0) == Vec3(0, 4e-5, 0));
  CHECK(f(Vec3(40, 5, 5), 0) == Vec3::Zero());

  ForcingConfig rot;
  rot.kind = ForcingKind::RigidRotationProjected;
  rot.amplitude = 0.1;
  rot.center = Vec3(1, 0, 0);
  const Forcing g(rot);
  const Vec3 x(1, 2, 0);
  CHECK(g(x, 0).isApprox(Vec3(0.1, 0, 0)));  // (0,1,0) x (0,0,1)
  const Vec3 y(2.3, -0.4, 0.7);
  const Vec3 gy = g(y, 0);
  CHECK(std::abs(gy.dot(y - rot.center)) <= 1e-15);
  CHECK(std::abs(gy.z()) <= 1e-15);
  CHECK(g(rot.center, 0) == Vec3::Zero());

  ForcingConfig ex;
  ex.kind = ForcingKind::Expression;
  ex.fx = "-y";
  ex.fy = "x * t";
  ex.t_off = 2;
  const Forcing h(ex);
  CHECK(h.time_dependent());
  CHECK(h(Vec3(1, 2, 3), 1.5) == Vec3(-2, 1.5, 0));
  CHECK(h(Vec3(1, 2, 3), 2.5) == Vec3::Zero());
}

TEST_CASE("forcing load vectors") {
  const SurfaceMesh mesh = meshgen::torus(4, 3);
  const FeSpace V = build_space(mesh, SpaceKind::BDM, 1, Constraint::ZeroNormalTrace);
  ForcingConfig c;
  c.kind = ForcingKind::ConstantBand;
  c.upper = 0;
  c.t_off = 0;
  const ForcingLoad load = make_forcing_load(V, c);
  const Eigen::VectorXd direct =
      assemble_load(V, VectorFunction([](int, const Vec3& x) { return x.x() < 0 ? Vec3(0, 1, 0) : Vec3::Zero(); }));
  CHECK((load(0.0) - direct).norm() == 0.0);
  CHECK(load(0.1).norm() == 0.0);

  ForcingConfig e;
  e.kind = ForcingKind::Expression;
  e.fx = "z * t";
  const ForcingLoad tl = make_forcing_load(V, e);
  const Eigen::VectorXd at2 =
      assemble_load(V, VectorFunction([](int, const Vec3& x) { return Vec3(2 * x.z(), 0, 0); }));
  CHECK((tl(2.0) - at2).norm() <= 1e-14 * at2.norm());

  ForcingConfig none;
  CHECK(make_forcing_load(V, none)(1.0).norm() == 0.0);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(Errc::ParseError) == 2);
  CHECK(exit_code(Errc::NonManifold) == 2);
  CHECK(exit_code(Errc::ConfigError) == 2);
  CHECK(exit_code(Errc::IoError) == 2);
  CHECK(exit_code(Errc::MaxAttemptsExceeded) == 3);
  CHECK(exit_code(Errc::NaNDetected) == 3);
  CHECK(exit_code(Errc::SingularOperator) == 3);
  CHECK(exit_code(Errc::SolverFailure) == 4);
  CHECK(exit_code(Errc::NotSPD) == 4);
  CHECK(exit_code(Errc::SingularSchur) == 4);
}

TEST_CASE("argument handling") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).out.find(kVersion) != std::string::npos);
  CHECK(cli({"topology", "--k", "two"}).code == 2);
  const Result r = cli({"topology"});
  CHECK(r.code == 2);
  CHECK(r.err.find("no mesh") != std::string::npos);
  CHECK(cli({"topology", "--mesh", "/nonexistent/mesh.off"}).code == 2);
}

TEST_CASE("topology command") {
  TempDir dir("topology");
  save_mesh(dir / "tetra.off", meshgen::tetrahedron());
  save_mesh(dir / "torus.obj", meshgen::torus(6, 4));
  save_mesh(dir / "holes.off", meshgen::holed_sphere(2, 4));
  const Result a = cli({"topology", "--mesh", dir / "tetra.off"});
  REQUIRE(a.code == 0);
  CHECK(last_json(a.out)["b1"] == 0);
  CHECK(last_json(a.out)["euler_characteristic"] == 2);
  CHECK(last_json(cli({"topology", "--mesh", dir / "torus.obj"}).out)["b1"] == 2);
  const Result c = cli({"topology", "--mesh", dir / "holes.off", "--out-dir", dir / "out"});
  CHECK(last_json(c.out)["b1"] == 3);
  CHECK(last_json(c.out)["boundary_loops"] == 4);
  CHECK(fs::exists(dir.path / "out" / "topology.json"));
  CHECK(fs::exists(dir.path / "out" / "topology_manifest.json"));

  write_text(dir / "broken.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n");
  const Result bad = cli({"topology", "--mesh", dir / "broken.off"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("ParseError") != std::string::npos);
}

TEST_CASE("harmonic command") {
  TempDir dir("harmonic");
  save_mesh(dir / "sphere.off", meshgen::icosphere(1));
  save_mesh(dir / "torus.off", meshgen::torus(6, 4));
  save_mesh(dir / "genus2.off", meshgen::genus_plate(2));

  SUBCASE("sphere gives an empty basis") {
    const Result r = cli({"harmonic", "--mesh", dir / "sphere.off", "--k", "1", "--out-dir", dir / "s"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("b1=0") != std::string::npos);
    const HarmonicBasis b = load_basis(dir.path / "s" / "harmonic_basis.json");
    CHECK(b.size() == 0);
  }

  SUBCASE("seeds change coefficients but not the span") {
    REQUIRE(cli({"harmonic", "--mesh", dir / "torus.off", "--k", "0", "--seed", "1", "--out-dir", dir / "a"}).code ==
            0);
    REQUIRE(cli({"harmonic", "--mesh", dir / "torus.off", "--k", "0", "--seed", "2", "--out-dir", dir / "b"}).code ==
            0);
    const HarmonicBasis a = load_basis(dir.path / "a" / "harmonic_basis.json");
    const HarmonicBasis b = load_basis(dir.path / "b" / "harmonic_basis.json");
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 2);
    CHECK((a.matrix() - b.matrix()).norm() > 1e-3);
    const SurfaceMesh mesh = load_mesh(dir / "torus.off");
    const HodgeContext ctx(mesh, 0);
    CHECK((projector(a, ctx.mass()) - projector(b, ctx.mass())).cwiseAbs().maxCoeff() <= 1e-8);
    const Json report = Json::parse(slurp(dir.path / "a" / "harmonic_report.json"));
    CHECK(report["gram_residual"].get<double>() <= 1e-10);
    CHECK(report["rot_cross_gram"].get<double>() <= 1e-10);
  }

  SUBCASE("genus two") {
    const Result r = cli({"harmonic", "--mesh", dir / "genus2.off", "--k", "1", "--out-dir", dir / "g"});
    REQUIRE(r.code == 0);
    CHECK(last_json(r.out)["fields"] == 4);
  }

  SUBCASE("exhausted attempts exit with 3") {
    const Result r = cli({"harmonic", "--mesh", dir / "torus.off", "--tol", "1e6", "--out-dir", dir / "x"});
    CHECK(r.code == 3);
    CHECK(r.err.find("MaxAttemptsExceeded") != std::string::npos);
  }
}

TEST_CASE("manifests list outputs and runs reproduce bitwise") {
  TempDir dir("manifest");
  save_mesh(dir / "torus.off", meshgen::torus(5, 3));
  const std::vector<std::string> args{"harmonic", "--mesh", dir / "torus.off", "--k", "1", "--seed", "5"};
  auto with_out = [&](const std::string& out) {
    auto a = args;
    a.push_back("--out-dir");
    a.push_back(out);
    return a;
  };
  REQUIRE(cli(with_out(dir / "r1")).code == 0);
  const Json m = Json::parse(slurp(dir.path / "r1" / "harmonic_manifest.json"));
  CHECK(m["command"] == "harmonic");
  CHECK(m["seed"] == 5);
  CHECK(m["version"] == kVersion);
  CHECK(m["config"]["k"] == "1");
  CHECK(m["mesh_checksum"].get<std::string>().size() == 16);
  CHECK(m["timings"].contains("harmonic_basis"));
  std::vector<std::string> listed = m["outputs"];
  for (const auto& e : fs::directory_iterator(dir.path / "r1")) {
    const std::string name = e.path().filename().string();
    if (name != "harmonic_manifest.json") CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());
  }

  // replay the recorded argument list into a second directory
  std::vector<std::string> replay = m["argv"];
  const auto it = std::find(replay.begin(), replay.end(), "--out-dir");
  REQUIRE(it != replay.end());
  *(it + 1) = dir / "r2";
  REQUIRE(cli(replay).code == 0);
  for (const auto& name : listed) CHECK(slurp(dir.path / "r1" / name) == slurp(dir.path / "r2" / name));
}

TEST_CASE("decompose command") {
  TempDir dir("decompose");
  save_mesh(dir / "torus.off", meshgen::torus(6, 4));

  SUBCASE("rot of a streamfunction expression") {
    const Result r = cli({"decompose", "--mesh", dir / "torus.off", "--k", "1", "--field", "psi:sin(x) * z + y",
                          "--out-dir", dir / "p"});
    REQUIRE(r.code == 0);
    const Json j = last_json(r.out);
    const double n = j["norm"];
    CHECK(n > 0.1);
    CHECK(j["harmonic_norm"].get<double>() <= 1e-10 * n);
    CHECK(j["gradient_norm"].get<double>() <= 1e-10 * n);
    CHECK(std::abs(j["rot_norm"].get<double>() - n) <= 1e-10 * n);
    CHECK(fs::exists(dir.path / "p" / "decompose.vtk"));
  }

  SUBCASE("random field satisfies Pythagoras") {
    const Result r = cli({"decompose", "--mesh", dir / "torus.off", "--k", "2", "--seed", "3", "--out-dir", dir / "r"});
    REQUIRE(r.code == 0);
    const Json j = last_json(r.out);
    const double n = j["norm"], a = j["rot_norm"], b = j["harmonic_norm"], c = j["gradient_norm"];
    CHECK(std::abs(n * n - a * a - b * b - c * c) <= 1e-10 * n * n);
    CHECK(j["residual_norm"].get<double>() <= 1e-10 * n);
  }

  SUBCASE("constant ambient field has a harmonic part") {
    const Result r =
        cli({"decompose", "--mesh", dir / "torus.off", "--field", "vector:0;0;1", "--out-dir", dir / "v"});
    REQUIRE(r.code == 0);
    CHECK(last_json(r.out)["harmonic_norm"].get<double>() > 1e-3);
  }

  SUBCASE("precomputed basis") {
    REQUIRE(cli({"harmonic", "--mesh", dir / "torus.off", "--k", "1", "--out-dir", dir / "b"}).code == 0);
    const Result r = cli({"decompose", "--mesh", dir / "torus.off", "--k", "1", "--basis",
                          dir / "b/harmonic_basis.json", "--out-dir", dir / "d"});
    CHECK(r.code == 0);
    const Result wrong = cli({"decompose", "--mesh", dir / "torus.off", "--k", "2", "--basis",
                              dir / "b/harmonic_basis.json", "--out-dir", dir / "d"});
    CHECK(wrong.code == 2);
    CHECK(wrong.err.find("BasisMismatch") != std::string::npos);
  }

  CHECK(cli({"decompose", "--mesh", dir / "torus.off", "--field", "curl:x"}).code == 2);
}

TEST_CASE("stokes command") {
  TempDir dir("stokes");
  save_mesh(dir / "torus.off", meshgen::torus(6, 4));
  save_mesh(dir / "holes.off", meshgen::holed_sphere(2, 4));

  SUBCASE("zero forcing gives a zero solution") {
    write_text(dir / "zero.cfg", "mesh = torus.off\nk = 1\nforcing = none\n");
    const Result r = cli({"stokes", "--config", dir / "zero.cfg", "--out-dir", dir / "z"});
    REQUIRE(r.code == 0);
    const Json j = last_json(r.out);
    CHECK(j["velocity_norm"] == 0.0);
    CHECK(j["pressure_norm"] == 0.0);
    CHECK(fs::exists(dir.path / "z" / "flow_stokes.vtk"));
  }

  SUBCASE("saddle comparison") {
    write_text(dir / "band.cfg",
               "mesh = holes.off\nk = 2\nforcing = constant-band\nforcing.axis = x\nforcing.upper = 0.2\n"
               "prefix = band\n");
    const Result r = cli({"stokes", "--config", dir / "band.cfg", "--compare-saddle", "--out-dir", dir / "s"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("saddle L2 discrepancy") != std::string::npos);
    const Json j = last_json(r.out);
    CHECK(j["velocity_norm"].get<double>() > 0);
    CHECK(j["saddle"]["velocity_difference"].get<double>() <= 1e-8);
    CHECK(j["saddle"]["pressure_difference"].get<double>() <= 1e-8);
    CHECK(j["divergence_norm"].get<double>() <= 1e-10 * j["velocity_norm"].get<double>());
  }

  SUBCASE("config errors exit with 2") {
    write_text(dir / "bad.cfg", "mesh = torus.off\nviscosity = 1\n");
    const Result r = cli({"stokes", "--config", dir / "bad.cfg"});
    CHECK(r.code == 2);
    CHECK(r.err.find("viscosity") != std::string::npos);
    CHECK(cli({"stokes", "--config", dir / "missing.cfg"}).code == 2);
  }
}

TEST_CASE("nse command") {
  TempDir dir("nse");
  save_mesh(dir / "torus.off", meshgen::torus(6, 4));
  write_text(dir / "decay.cfg",
             "mesh = torus.off\nk = 1\nmu = 0.1\ndt = 0.01\nt_end = 0.5\noutput_every = 20\n"
             "forcing = constant-band\nforcing.upper = 0\nforcing.t_off = 0\nprefix = decay\n");
  const Result r = cli({"nse", "--config", dir / "decay.cfg", "--out-dir", dir / "o"});
  REQUIRE(r.code == 0);
  const Json j = last_json(r.out);
  CHECK(j["steps"] == 50);
  CHECK(j["energy_non_increasing"] == true);
  CHECK(j["initial_kinetic_energy"].get<double>() > j["final_kinetic_energy"].get<double>());
  CHECK(j["max_relative_divergence"].get<double>() <= 1e-10);

  std::ifstream csv(dir.path / "o" / "decay_series.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == series_csv_header(2));
  double prev = INFINITY;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string step, t, e;
    std::getline(ss, step, ',');
    std::getline(ss, t, ',');
    std::getline(ss, e, ',');
    const double energy = std::stod(e);
    CHECK(energy <= prev * (1 + 1e-10));
    prev = energy;
    ++rows;
  }
  CHECK(rows == 51);

  const Json m = Json::parse(slurp(dir.path / "o" / "nse_manifest.json"));
  std::vector<std::string> listed = m["outputs"];
  for (const char* name : {"decay_series.csv", "decay_000000.vtk", "decay_000040.vtk", "decay_000050.vtk",
                           "decay_nse_report.json"})
    CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());
  for (const auto& name : listed) CHECK(fs::exists(dir.path / "o" / name));
}

TEST_CASE("verify command") {
  TempDir dir("verify");
  fs::create_directories(dir.path / "corpus");
  save_mesh(dir.path / "corpus" / "tetra.off", meshgen::tetrahedron());
  save_mesh(dir.path / "corpus" / "torus.obj", meshgen::torus(6, 4));
  save_mesh(dir.path / "corpus" / "genus2.off", meshgen::genus_plate(2));
  save_mesh(dir.path / "corpus" / "holes.off", meshgen::holed_sphere(2, 4));
  const Result r = cli({"verify", "--corpus", dir / "corpus", "--k", "2", "--out-dir", dir / "o"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  const Json j = Json::parse(slurp(dir.path / "o" / "verify_report.json"));
  CHECK(j["meshes"].size() == 4);
  CHECK(j["pass"] == true);

  SUBCASE("flipped triangle is repaired") {
    const SurfaceMesh torus = meshgen::torus(5, 3);
    std::ostringstream off;
    off.precision(17);
    off << "OFF\n" << torus.num_vertices() << ' ' << torus.num_triangles() << " 0\n";
    for (const auto& p : torus.positions()) off << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (int t = 0; t < torus.num_triangles(); ++t) {
      const auto& tri = torus.triangle(t);
      if (t == 7) off << "3 " << tri[0] << ' ' << tri[2] << ' ' << tri[1] << '\n';
      else off << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
    write_text(dir / "flipped.off", off.str());
    const Result f = cli({"verify", "--mesh", dir / "flipped.off", "--k", "1", "--out-dir", dir / "f"});
    CHECK(f.code == 0);
    const Json fj = Json::parse(slurp(dir.path / "f" / "verify_report.json"));
    CHECK(fj["meshes"][0]["flipped_triangles"].get<int>() >= 1);
  }

  SUBCASE("non-manifold input fails cleanly") {
    write_text(dir / "fan.off",
               "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 1 4\n");
    const Result f = cli({"verify", "--mesh", dir / "fan.off"});
    CHECK(f.code == 2);
    CHECK(f.err.find("NonManifold") != std::string::npos);
  }
}
