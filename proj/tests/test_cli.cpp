#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include "ddf/cli/cli.hpp"
#include "ddf/io/formats.hpp"
#include "ddf/io/mesh_io.hpp"

namespace fs = std::filesystem;
using namespace ddf;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ddf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ddf_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct ScopedSeed {
  explicit ScopedSeed(const char* v) { ::setenv("DDF_SEED", v, 1); }
  ~ScopedSeed() { ::unsetenv("DDF_SEED"); }
};

void write_sphere(const std::string& path, double r) { io::save_obj(path, make_icosphere(Vec3::Zero(), r, 2)); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"gen-rays", "--count", "10"}).code == cli::kExitUsage);
  CHECK(run({"gen-rays", "--count", "10", "--out", "x", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"gen-rays", "--count", "-3", "--out", "x"}).code == cli::kExitUsage);
  CHECK(run({"convert", "--to", "stl", "--out", "x", "--sphere", "1"}).code == cli::kExitUsage);
  CHECK(run({"eval"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("data errors exit 2") {
  TempDir dir;
  CHECK(run({"gen-gt", "--mesh", dir / "missing.obj", "--rays", dir / "r.ddfr", "--out", dir / "gt.ddfr"}).code ==
        cli::kExitData);
  std::ofstream(dir / "zero.obj") << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
  REQUIRE(run({"gen-rays", "--count", "10", "--out", dir / "r.ddfr"}).code == 0);
  const auto r = run({"gen-gt", "--mesh", dir / "zero.obj", "--rays", dir / "r.ddfr", "--out", dir / "gt.ddfr"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("1-based") != std::string::npos);
  std::ofstream(dir / "junk.ddfr") << "garbage";
  CHECK(run({"gen-gt", "--mesh", dir / "zero.obj", "--rays", dir / "junk.ddfr", "--out", dir / "gt.ddfr"}).code ==
        cli::kExitData);
}

TEST_CASE("gen-rays, gen-gt and DDF_SEED") {
  TempDir dir;
  write_sphere(dir / "s.obj", 0.8);
  REQUIRE(run({"gen-rays", "--count", "500", "--seed", "3", "--out", dir / "a.ddfr"}).code == 0);
  REQUIRE(run({"gen-rays", "--count", "500", "--seed", "3", "--out", dir / "b.ddfr"}).code == 0);
  REQUIRE(run({"gen-rays", "--count", "500", "--seed", "4", "--out", dir / "c.ddfr"}).code == 0);
  CHECK(slurp(dir / "a.ddfr") == slurp(dir / "b.ddfr"));
  CHECK(slurp(dir / "a.ddfr") != slurp(dir / "c.ddfr"));
  {
    ScopedSeed s("3");
    REQUIRE(run({"gen-rays", "--count", "500", "--seed", "4", "--out", dir / "d.ddfr"}).code == 0);
  }
  CHECK(slurp(dir / "a.ddfr") == slurp(dir / "d.ddfr"));
  {
    ScopedSeed s("three");
    CHECK(run({"gen-rays", "--count", "5", "--out", dir / "e.ddfr"}).code == cli::kExitUsage);
  }

  REQUIRE(run({"gen-gt", "--mesh", dir / "s.obj", "--rays", dir / "a.ddfr", "--out", dir / "gt.ddfr"}).code == 0);
  const auto gt = io::load_ray_dataset(dir / "gt.ddfr");
  CHECK(gt.has_ground_truth);
  CHECK(gt.samples.size() == 500);
  int visible = 0;
  for (const auto& s : gt.samples) visible += s.visible();
  CHECK(visible > 100);

  REQUIRE(run({"gen-rays", "--count", "10", "--out", dir / "r.ddfr", "--pairs", "40", "--plane", "0", "0", "0", "1",
               "0", "0", "--pairs-out", dir / "p.ddfr"})
              .code == 0);
  const auto pairs = io::dataset_to_pairs(io::load_ray_dataset(dir / "p.ddfr"));
  CHECK(pairs.size() == 40);
  for (const auto& p : pairs) CHECK(std::abs(p.a.origin.x()) <= 1e-6);
}

TEST_CASE("eval of identical clouds gives identity metrics") {
  TempDir dir;
  REQUIRE(run({"convert", "--sphere", "1", "--to", "ply", "--rays", "500", "--out", dir / "a.ply"}).code == 0);
  const auto r = run({"eval", "--pred", dir / "a.ply", "--gt", dir / "a.ply"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["f5"] == 1.0);
  CHECK(j["f10"] == 1.0);
  CHECK(j["cd"] == 0.0);
  CHECK(j["convention"] == "mean-squared-sum");
  CHECK(j["units"] == "mm2");
}

TEST_CASE("convert to obj and make-pyramid") {
  TempDir dir;
  REQUIRE(run({"convert", "--sphere", "0.8", "--to", "obj", "--resolution", "16", "--directions", "8", "--out",
               dir / "m.obj"})
              .code == 0);
  const auto mesh = io::load_obj(dir / "m.obj").mesh;
  CHECK(mesh.faces.size() > 50);
  REQUIRE(run({"make-pyramid", "--mesh", dir / "m.obj", "--out", dir / "p.ddfp", "--levels", "3"}).code == 0);
  CHECK(io::load_pyramid(dir / "p.ddfp").levels.size() == 3);
}

TEST_CASE("gradcheck subcommand") {
  const auto r = run({"gradcheck", "--seed", "7"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["max_relative_error"].get<double>() <= 1e-3);
  CHECK(j["passed"] == true);
}

TEST_CASE("fit is deterministic and eval reads its checkpoint") {
  TempDir dir;
  write_sphere(dir / "s.obj", 0.6);
  REQUIRE(run({"gen-rays", "--count", "300", "--seed", "1", "--out", dir / "r.ddfr", "--pairs", "50", "--pairs-out",
               dir / "p.ddfr"})
              .code == 0);
  REQUIRE(run({"gen-gt", "--mesh", dir / "s.obj", "--rays", dir / "r.ddfr", "--out", dir / "gt.ddfr"}).code == 0);
  std::ofstream(dir / "cfg.json") << R"({"rays": "gt.ddfr", "pairs": "p.ddfr", "mesh": "s.obj", "width": 16,
    "pe_bands": [2, 1], "epochs": 3, "batch": 64, "seed": 5})";
  REQUIRE(run({"fit", "--config", dir / "cfg.json", "--out", dir / "a.ddfn", "--log", dir / "a.json"}).code == 0);
  REQUIRE(run({"fit", "--config", dir / "cfg.json", "--out", dir / "b.ddfn", "--log", dir / "b.json"}).code == 0);
  CHECK(slurp(dir / "a.ddfn") == slurp(dir / "b.ddfn"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto log = nlohmann::json::parse(slurp(dir / "a.json"));
  REQUIRE(log["epochs"].size() == 3);
  CHECK(log["epochs"][0].contains("l_sym"));
  {
    ScopedSeed s("6");
    REQUIRE(run({"fit", "--config", dir / "cfg.json", "--out", dir / "c.ddfn"}).code == 0);
  }
  CHECK(slurp(dir / "a.ddfn") != slurp(dir / "c.ddfn"));

  const auto e = run({"eval", "--checkpoint", dir / "a.ddfn", "--mesh", dir / "s.obj", "--rays", "300"});
  REQUIRE(e.code == 0);
  const auto m = nlohmann::json::parse(e.out);
  CHECK(m["cd"].get<double>() >= 0.0);
  CHECK(run({"convert", "--checkpoint", dir / "a.ddfn", "--to", "ply", "--rays", "200", "--out", dir / "c.ply"}).code ==
        0);

  std::ofstream(dir / "bad.json") << R"({"rays": "gt.ddfr", "mesh": "s.obj", "learning_rate": 1})";
  CHECK(run({"fit", "--config", dir / "bad.json", "--out", dir / "x.ddfn"}).code == cli::kExitData);
}

TEST_CASE("the installed binary reports exit codes") {
#ifdef DDF_CLI_PATH
  const std::string bin = DDF_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((bin + " > /dev/null 2>&1").c_str())) == 1);
  CHECK(WEXITSTATUS(std::system((bin + " gen-gt --mesh /nonexistent.obj --rays /nonexistent --out /dev/null > /dev/null 2>&1").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((bin + " gradcheck --samples 4 > /dev/null 2>&1").c_str())) == 0);
#endif
}
