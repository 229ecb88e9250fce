#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flpbd/common.hpp"
#include "flpbd/instance.hpp"
#include "flpbd/recourse.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd {

enum class SolveStatus { kOptimal, kTimeLimit, kMemoryLimit, kInfeasible };

std::string_view status_name(SolveStatus s);  // "optimal", "time-limit", ...

/// 100 (z_upper - z_lower) / z_lower. Equal bounds give 0 (also at zero);
/// a missing bound or a nonpositive z_lower with z_upper above it gives +inf.
double gap_pct(double z_upper, double z_lower);

struct SolveStats {
  std::int64_t nodes = 0;
  double wall_seconds = 0.0;
};

struct SolveResult {
  Policy policy = Policy::kFacilityOutsourcing;
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<FirstStageSolution> best_solution;
  std::optional<PolicyEvaluation> evaluation;  // recourse detail of best_solution
  double z_upper = std::numeric_limits<double>::infinity();
  double z_lower = -std::numeric_limits<double>::infinity();
  SolveStats stats;

  double gap() const { return gap_pct(z_upper, z_lower); }
};

struct BruteForceGuards {
  std::size_t max_sites = 4;
  std::size_t max_customers = 8;
  std::size_t max_scenarios = 16;
};

/// Partially decided first stage. open[i]: -1 undecided, 0 closed, 1 open.
/// site_of[j]: -1 undecided, otherwise the site j must be assigned to.
struct PartialFixing {
  std::vector<int> open;
  std::vector<int> site_of;

  static PartialFixing none(const Instance& inst) {
    return {std::vector<int>(inst.n_sites, -1), std::vector<int>(inst.n_customers, -1)};
  }
};

/// Exact optimum by enumerating every open set and every assignment to it.
/// Throws InputError when the instance exceeds the guards.
SolveResult brute_force(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const BruteForceGuards& guards = {});
/// Same, restricted to completions of `fixing`.
SolveResult brute_force(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const PartialFixing& fixing, const BruteForceGuards& guards = {});

struct Limits {
  double time_seconds = std::numeric_limits<double>::infinity();
  std::int64_t max_nodes = std::numeric_limits<std::int64_t>::max();
  /// Open-node cap; exceeding it ends the search with status memory-limit.
  std::size_t max_open_nodes = 10'000'000;
};

/// Node handed to a NodeObserver after its bound is computed.
struct NodeInfo {
  PartialFixing fixing;
  double lower_bound = 0.0;
  int depth = 0;
};
using NodeObserver = std::function<void(const NodeInfo&)>;

/// Depth-first branch-and-bound: site decisions first (largest service-cost
/// spread first, open branch first), then customers by decreasing empirical
/// probability over open sites by ascending cost. Single-threaded.
SolveResult branch_and_bound(const Instance& inst, const ScenarioSet& scen, Policy policy,
                             const Limits& limits = {}, const NodeObserver& observer = {});

/// Greedy first stage: cheapest sites per capacity unit until the expected
/// demand is covered, cheapest-site assignment, then a repair pass for the
/// lower bounds. Empty if no site can be opened.
std::optional<FirstStageSolution> greedy_solution(const Instance& inst, const ScenarioSet& scen);

/// Node lower bound used by branch_and_bound (exposed for auditing).
double node_lower_bound(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const PartialFixing& fixing);

// External solver round trip.

struct ExternalSolution {
  std::optional<double> objective;
  std::vector<std::pair<std::string, double>> values;
};

/// Parses a CPLEX-style .sol XML file or plain "name value" lines (an
/// "objective" / "Objective value:" line carries the objective).
ExternalSolution parse_solution_text(std::string_view text);
ExternalSolution parse_solution_file(const std::filesystem::path& path);

/// Error raised by solve_via_export: process failure, unreadable solution or
/// objective mismatch.
class ExternalSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExternalOptions {
  /// Shell command with {model} and {solution} placeholders.
  std::string solver_cmd;
  std::filesystem::path work_dir;  // empty: a fresh temporary directory
  bool keep_files = false;
  double mismatch_tol = 1e-6;
};

/// Checks an external answer: rebuilds the first stage from y_* and x_*_*,
/// requires it to be feasible and its objective to match the recourse module.
/// Throws ExternalSolverError otherwise.
SolveResult verify_external_solution(const Instance& inst, const ScenarioSet& scen,
                                     Policy policy, const ExternalSolution& sol,
                                     double mismatch_tol = 1e-6);

/// Exports the policy MILP as MPS, runs the external solver, reads the first
/// stage back and checks the reported objective against the recourse module.
SolveResult solve_via_export(const Instance& inst, const ScenarioSet& scen, Policy policy,
                             const ExternalOptions& options);

}  // namespace flpbd
