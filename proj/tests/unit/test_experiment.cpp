#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flpbd/experiment.hpp"
#include "test_support.hpp"

using namespace flpbd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_file_config(const fs::path& dir) {
  Rng rng(10);
  testing::RandomInstanceOptions opt;
  opt.sites = 3;
  opt.customers = 5;
  const auto inst = testing::random_instance(rng, opt);
  save_instance(inst, dir / "inst.json");
  ExperimentConfig cfg;
  cfg.instance_file = dir / "inst.json";
  cfg.n_scenarios = 6;
  cfg.out_dir = dir / "out";
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("config validation and JSON loading") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(validate_config(cfg));
  cfg.policies.clear();
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.instance_file = "inst.json";
  cfg.n_scenarios = 0;
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.grid.scenarios = {0};
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.time_limit = -1;
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.solver = SolverChoice::kExternal;
  CHECK_THROWS_AS(validate_config(cfg), InputError);

  const auto doc = nlohmann::json::parse(R"({
    "policies": ["fo", "RO"], "time_limit": 5, "seed": 9, "out": "x",
    "grid": {"sites": [3], "customers": [6], "scenarios": [4], "correlation": [false],
             "gamma": [2], "pattern": ["PT2"]}})");
  const auto parsed = config_from_json(doc);
  CHECK(parsed.policies == std::vector<Policy>{Policy::kFacilityOutsourcing, Policy::kReassignmentOutsourcing});
  CHECK(parsed.time_limit == 5.0);
  CHECK(parsed.seed == 9);
  CHECK(parsed.grid.gammas == std::vector<int>{2});
  CHECK(parsed.grid.patterns == std::vector<DemandPattern>{DemandPattern::kPT2});
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"policies": ["zz"]})")), InputError);
}

TEST_CASE("one tiny instance end to end") {
  const auto dir = fresh_dir("flpbd_exp_tiny");
  const auto cfg = tiny_file_config(dir);
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.instances.size() == 1);
  const auto& inst = rep.instances[0];
  for (const auto& r : inst.results) {
    REQUIRE(r);
    CHECK(r->status == SolveStatus::kOptimal);
  }
  REQUIRE(inst.gaps);
  for (Policy p : kAllPolicies) CHECK(inst.gaps->at(p, p) == 0.0);

  std::istringstream results(slurp(cfg.out_dir / "results.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(results, line)) ++rows;
  CHECK(rows == 4);
  for (const char* f : {"gap_mean.csv", "cost_structure.csv", "open_facilities.csv", "summary.csv", "timings.txt"}) {
    CHECK(fs::exists(cfg.out_dir / f));
  }
  fs::remove_all(dir);
}

TEST_CASE("zero time limit still reports") {
  const auto dir = fresh_dir("flpbd_exp_zero");
  auto cfg = tiny_file_config(dir);
  cfg.time_limit = 0.0;
  const auto rep = run_experiment(cfg);
  for (const auto& r : rep.instances[0].results) {
    REQUIRE(r);
    CHECK(r->status == SolveStatus::kTimeLimit);
  }
  CHECK(fs::exists(cfg.out_dir / "gap_mean.csv"));
  fs::remove_all(dir);
}

TEST_CASE("reruns reproduce the CSVs byte for byte") {
  const auto dir = fresh_dir("flpbd_exp_det");
  ExperimentConfig cfg;
  cfg.grid.sites = {3};
  cfg.grid.customers = {5};
  cfg.grid.scenarios = {6};
  cfg.grid.gammas = {1};
  cfg.out_dir = dir / "a";
  cfg.threads = 2;
  const auto first = run_experiment(cfg);
  cfg.out_dir = dir / "b";
  cfg.threads = 1;
  run_experiment(cfg);
  for (const auto& f : first.files) {
    if (f.extension() != ".csv" && f.extension() != ".json") continue;
    const auto rel = fs::relative(f, dir / "a");
    CHECK(slurp(f) == slurp(dir / "b" / rel));
  }
  fs::remove_all(dir);
}
