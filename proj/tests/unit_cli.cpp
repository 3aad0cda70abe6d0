#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inertia/config.hpp"
#include "inertia/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace inertia;

namespace {

#ifndef INERTIA_CLI_PATH
#define INERTIA_CLI_PATH "./inertia"
#endif

int run_cli(const std::string& args) {
  std::string cmd = std::string(INERTIA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing basics") {
  KeyValueConfig kv = KeyValueConfig::from_string(
      "system = toy1d\n# comment\nn_steps = 100  # trailing\nepsilon = 5e-2\n");
  CHECK(kv.get("system", "") == "toy1d");
  CHECK(kv.get_int("n_steps", 0) == 100);
  CHECK(kv.get_real("epsilon", 0) == 5e-2);
  CHECK_THROWS_AS(KeyValueConfig::from_string("not a pair\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::from_string("n_steps = abc\n").get_int("n_steps", 0),
                  ConfigError);
}

TEST_CASE("run config resolves and snapshots reloadably") {
  KeyValueConfig kv = KeyValueConfig::from_string("system = toy3d\nseed = 9\nn_steps = 50\n");
  RunConfig rc = RunConfig::from_config(kv);
  CHECK(rc.spec.dim == 3);
  CHECK(rc.seed == 9);
  KeyValueConfig snap = rc.to_config();
  RunConfig rc2 = RunConfig::from_config(snap);
  CHECK(rc2.n_steps == rc.n_steps);
  CHECK(rc2.dt == rc.dt);
  CHECK(rc2.x0 == rc.x0);
  CHECK(snap.hash() == rc2.to_config().hash());
}

TEST_CASE("geometric grid endpoints and monotonicity") {
  Vec g = geometric_grid(1e-2, 1e-1, 10);
  CHECK(g[0] == doctest::Approx(1e-2));
  CHECK(g[g.size() - 1] == doctest::Approx(1e-1));
  CHECK(g.size() == 11);
  for (Index i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK_THROWS_AS(geometric_grid(0.1, 0.01, 10), ConfigError);
}

TEST_CASE("simulate writes the documented row count and is byte-stable") {
  TempDir dir("inertia_cli_sim");
  std::string out = dir.path.string();
  REQUIRE(run_cli("simulate --system toy1d --seed 4 --out " + out) == 0);
  CsvTable t = read_csv((dir.path / "trajectory.csv").string());
  CHECK(t.values.rows() == 20001);  // N = 2e4 samples plus the initial point

  std::string first = slurp(dir.path / "trajectory.csv");
  REQUIRE(run_cli("simulate --system toy1d --seed 4 --out " + out) == 0);
  CHECK(slurp(dir.path / "trajectory.csv") == first);

  // the manifest is itself a loadable config reproducing the run
  REQUIRE(fs::exists(dir.path / "simulate_manifest.txt"));
  REQUIRE(run_cli("simulate --config " + (dir.path / "simulate_manifest.txt").string() +
                  " --out " + out) == 0);
  CHECK(slurp(dir.path / "trajectory.csv") == first);
}

TEST_CASE("simulate with a single step emits two rows") {
  TempDir dir("inertia_cli_min");
  std::ofstream cfg(dir.path / "run.cfg");
  cfg << "system = toy1d\nn_steps = 1\nx0 = 0.5\n";
  cfg.close();
  REQUIRE(run_cli("simulate --config " + (dir.path / "run.cfg").string() + " --out " +
                  dir.path.string()) == 0);
  CsvTable t = read_csv((dir.path / "trajectory.csv").string());
  CHECK(t.values.rows() == 2);
}

TEST_CASE("bad inputs exit with the config code") {
  TempDir dir("inertia_cli_bad");
  CHECK(run_cli("simulate --system nosuch --out " + dir.path.string()) == 1);
  // escape against a partition file defining an empty regime
  std::ofstream part(dir.path / "empty.csv");
  part << "index,label,in_regime\n0,0,0\n1,0,0\n";
  part.close();
  std::ofstream cfg(dir.path / "run.cfg");
  cfg << "system = toy1d\nn_steps = 200\n";
  cfg.close();
  int code = run_cli("escape --config " + (dir.path / "run.cfg").string() + " --regime " +
                     (dir.path / "empty.csv").string() + " --out " + dir.path.string());
  CHECK(code == 1);
  CHECK_FALSE(fs::exists(dir.path / "escape_profile.csv"));
  // missing trajectory file is an io error
  CHECK(run_cli("diagnose --system toy1d --trajectory /nonexistent.csv --out " +
                dir.path.string()) == 3);
}

TEST_CASE("pipeline composes: simulate, diagnose, escape, lifetimes on a small toy run") {
  TempDir dir("inertia_cli_pipe");
  std::string out = dir.path.string();
  std::ofstream cfg(dir.path / "run.cfg");
  cfg << "system = toy1d\nn_steps = 2500\nseed = 5\n"
      << "sigma_min = 0.02\nsigma_max = 0.08\nsigma_per_decade = 5\n";
  cfg.close();
  std::string base = " --config " + (dir.path / "run.cfg").string() + " --out " + out;
  REQUIRE(run_cli("simulate" + base) == 0);
  std::string traj = " --trajectory " + (dir.path / "trajectory.csv").string();
  REQUIRE(run_cli("diagnose" + base + traj) == 0);
  REQUIRE(run_cli("escape" + base + traj + " --regime ball") == 0);
  REQUIRE(run_cli("lifetimes" + base + traj + " --regime ball") == 0);
  REQUIRE(run_cli("oracle" + base + traj) == 0);

  CsvTable profile = read_csv((dir.path / "escape_profile.csv").string());
  CHECK(profile.values.rows() > 100);
  CHECK(profile.col("theta0") >= 0);
  CHECK(profile.col("sigma_max") >= 0);
  CsvTable lifetimes = read_csv((dir.path / "lifetimes_markov.csv").string());
  CsvTable oracle = read_csv((dir.path / "oracle_lifetimes.csv").string());
  CHECK(lifetimes.values.rows() == oracle.values.rows());
  // both lifetime columns are positive
  for (Index r = 0; r < lifetimes.values.rows(); ++r) {
    CHECK(lifetimes.values(r, 1) > 0);
    CHECK(oracle.values(r, 1) > 0);
  }
}
