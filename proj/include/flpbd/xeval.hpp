#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "flpbd/common.hpp"
#include "flpbd/instance.hpp"
#include "flpbd/recourse.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd {

template <typename T>
using PerPolicy = std::array<T, kNumPolicies>;

/// Entry (A, B) = 100 (cost_B(x*_A) - z*_B) / z*_B. Rows are the policy that
/// produced the first stage, columns the policy it is evaluated under.
struct GapMatrix {
  PerPolicy<Policy> policies{Policy::kFacilityOutsourcing, Policy::kCostDrivenOutsourcing,
                             Policy::kOrderDrivenOutsourcing,
                             Policy::kReassignmentOutsourcing};
  PerPolicy<PerPolicy<double>> gap{};       // NaN where a solution or optimum is missing
  PerPolicy<PerPolicy<double>> cost{};      // cost_B(x*_A)
  PerPolicy<bool> proven{};                 // z*_B proven optimal
  PerPolicy<PerPolicy<bool>> flagged{};     // negative entry against a best-found z*_B

  double at(Policy row, Policy col) const { return gap[policy_index(row)][policy_index(col)]; }
  bool has(Policy row, Policy col) const;
  /// Some off-diagonal pair (A, B) with both entries present and
  /// |gap(A,B) - gap(B,A)| > tol.
  bool asymmetric(double tol = 1e-9) const;
};

/// Missing solutions or optima (std::nullopt) leave their row or column NaN.
/// Throws InfeasibleSolutionError for a present but infeasible solution.
GapMatrix cross_gap(const Instance& inst, const ScenarioSet& scen,
                    const PerPolicy<std::optional<FirstStageSolution>>& solutions,
                    const PerPolicy<std::optional<double>>& optima,
                    const PerPolicy<bool>& proven = {true, true, true, true});

/// Plain averages over the matrices where an entry is present; `excluded`
/// counts the matrices without it.
struct GapSummary {
  PerPolicy<PerPolicy<double>> mean{};
  PerPolicy<PerPolicy<std::size_t>> count{};
  PerPolicy<PerPolicy<std::size_t>> excluded{};
};
GapSummary summarize_gaps(std::span<const GapMatrix> matrices);

struct CostStructure {
  Policy policy = Policy::kFacilityOutsourcing;
  double opening = 0.0;  // shares of the expected cost
  double service = 0.0;
  double penalty = 0.0;
  double reassign = 0.0;
  double total = 0.0;      // expected cost the shares refer to
  bool zero_total = false; // all shares 0 because the total is 0
};

CostStructure cost_breakdown(const PolicyEvaluation& evaluation);

struct OpenFacilityStats {
  PerPolicy<double> mean{};
  PerPolicy<std::size_t> count{};
};

/// Mean number of open sites per policy over the batch (policies without any
/// solution get NaN). Throws InputError for an empty batch.
OpenFacilityStats open_facility_stats(
    std::span<const PerPolicy<std::optional<FirstStageSolution>>> batch);

/// 9 significant digits; NaN as an empty field, infinities as inf / -inf.
std::string csv_number(double v);

void write_gap_csv(const GapMatrix& m, std::ostream& out);
void write_gap_summary_csv(const GapSummary& s, std::ostream& out);

}  // namespace flpbd
