#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flpbd/genbench.hpp"
#include "flpbd/solve.hpp"
#include "flpbd/xeval.hpp"
#include "json.hpp"

namespace flpbd {

/// Generated benchmark grid; one instance per combination.
struct GridSpec {
  std::vector<std::size_t> sites{3, 4};
  std::vector<std::size_t> customers{6, 8};
  std::vector<std::size_t> scenarios{8, 16};
  std::vector<bool> correlated{false, true};
  std::vector<int> gammas{1, 4};
  std::vector<DemandPattern> patterns{DemandPattern::kPT1, DemandPattern::kPT2};
  SetupVariability setup = SetupVariability::kTenth;
  LowerBoundMode ell = LowerBoundMode::kPositive;
  std::optional<std::filesystem::path> coords_file;  // TSPLIB; synthetic points otherwise
  std::size_t points = 60;
  int target_open = 5;
};

enum class SolverChoice { kInternal, kExternal };

struct ExperimentConfig {
  // Instance source: a file (with scenarios from a file or the sampler) or the grid.
  std::optional<std::filesystem::path> instance_file;
  std::optional<std::filesystem::path> scenario_file;
  std::size_t n_scenarios = 50;
  bool correlated = false;
  GridSpec grid;

  std::vector<Policy> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  SolverChoice solver = SolverChoice::kInternal;
  std::string solver_cmd;
  double time_limit = 60.0;  // seconds per solve
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  std::filesystem::path out_dir = "results";
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Throws InputError for an empty policy list, no scenarios, negative limits
/// or an external solver without command.
void validate_config(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentRow {
  std::string instance_id;
  Policy policy = Policy::kFacilityOutsourcing;
  std::optional<SolveResult> result;  // empty when the stage failed
  std::string error;
};

struct InstanceReport {
  std::string id;
  std::size_t n_sites = 0, n_customers = 0, n_scenarios = 0;
  bool correlated = false;
  int gamma = 0;
  std::string pattern;
  PerPolicy<std::optional<SolveResult>> results;
  std::optional<GapMatrix> gaps;
  std::vector<CostStructure> costs;
  std::vector<std::string> errors;
};

struct ExperimentReport {
  std::vector<InstanceReport> instances;
  GapSummary gap_summary;
  OpenFacilityStats open_stats;
  std::vector<std::filesystem::path> files;
};

/// Solves every (instance, policy), cross-evaluates, and writes results.csv,
/// gaps/gap_<id>.csv, gap_mean.csv, cost_structure.csv, open_facilities.csv
/// and summary.csv (deterministic) plus timings.txt (wall times) into
/// cfg.out_dir. Failures are recorded per row and the run continues.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace flpbd
