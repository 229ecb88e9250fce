#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "flpbd/milp.hpp"

namespace flpbd::milp {

enum class MipStatus { kOptimal, kInfeasible, kNodeLimit };

struct MipOptions {
  /// (column, value) pairs; the column's bounds collapse to the value.
  std::vector<std::pair<int, double>> fixed;
  /// Full column vector used as the initial incumbent where it is feasible.
  std::vector<double> start;
  std::int64_t node_limit = 2'000'000;
};

struct MipResult {
  MipStatus status = MipStatus::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  std::int64_t nodes = 0;
  int components = 0;
};

/// Small exact MILP solver for the models of this library: activity-based
/// presolve, splitting into independent blocks, a dense bounded simplex and
/// depth-first branch-and-bound on the binaries. Meant for checking models
/// on tiny instances, not for production solving.
MipResult solve_mip(const MilpModel& model, const MipOptions& options = {});

}  // namespace flpbd::milp
