#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flpbd/common.hpp"
#include "flpbd/instance.hpp"
#include "flpbd/min_cost_flow.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd {

inline constexpr int kNoDemand = -1;
inline constexpr int kOutsourced = -2;  // third party (FO/CO) or external source (RO)

/// A posteriori decisions for one scenario.
struct ScenarioOutcome {
  /// Per customer: serving site, kOutsourced, or kNoDemand. Under FO every
  /// demand customer is served by its own site (outsourcing buys units).
  std::vector<int> served;
  /// Per site: outsourced units (theta). Under RO: assigned customers that
  /// ended up at the external source.
  std::vector<int> n_outsourced_at;
  double service_cost = 0.0;
  double penalty_cost = 0.0;   // z: outsourcing penalties or external cost
  double reassign_cost = 0.0;  // RO only: sum of h_j over reassigned customers

  double total() const { return service_cost + penalty_cost + reassign_cost; }
};

struct CostBreakdown {
  double opening = 0.0;
  double service = 0.0;
  double penalty = 0.0;
  double reassign = 0.0;
  double total() const { return opening + service + penalty + reassign; }
};

struct PolicyEvaluation {
  Policy policy = Policy::kFacilityOutsourcing;
  std::vector<ScenarioOutcome> per_scenario;
  /// opening + pi-weighted service, penalty and reassignment; equal to
  /// breakdown.total() by construction.
  double expected_cost = 0.0;
  CostBreakdown breakdown;
};

/// Second-stage cost engine for one (instance, scenario set, policy).
///
/// Solutions are given as a site per customer plus open flags. Customers
/// with a negative site are left out, which lets branch-and-bound evaluate
/// partial assignments. Holds scratch buffers: use one object per thread.
class RecourseEvaluator {
 public:
  /// Throws InputError if the scenario set does not match the instance or if
  /// OD-CO is requested without call orders.
  RecourseEvaluator(const Instance& inst, const ScenarioSet& scen, Policy policy);

  Policy policy() const { return policy_; }
  const Instance& instance() const { return inst_; }
  const ScenarioSet& scenarios() const { return scen_; }

  double scenario_cost(std::size_t w, std::span<const int> site_of,
                       std::span<const std::uint8_t> open,
                       ScenarioOutcome* outcome = nullptr) const;

  /// sum_w pi_w * scenario_cost(w), accumulated in ascending w.
  double expected_recourse(std::span<const int> site_of,
                           std::span<const std::uint8_t> open) const;

 private:
  double fo_cost(std::size_t w, std::span<const int> site_of, ScenarioOutcome* out) const;
  double cdco_cost(std::size_t w, std::span<const int> site_of, ScenarioOutcome* out) const;
  double odco_cost(std::size_t w, std::span<const int> site_of, ScenarioOutcome* out) const;
  double ro_cost(std::size_t w, std::span<const int> site_of,
                 std::span<const std::uint8_t> open, ScenarioOutcome* out) const;

  const Instance& inst_;
  const ScenarioSet& scen_;
  Policy policy_;

  mutable std::vector<int> count_;
  mutable std::vector<std::vector<int>> by_site_;
  mutable std::vector<int> members_;
  mutable std::vector<int> customer_arc_;
  mutable std::vector<int> choice_;
  mutable MinCostFlow flow_;
};

/// Full evaluation with per-scenario outcomes. All require a first-stage
/// feasible solution (InfeasibleSolutionError otherwise).
PolicyEvaluation eval_fo(const Instance& inst, const ScenarioSet& scen,
                         const FirstStageSolution& sol);
PolicyEvaluation eval_cdco(const Instance& inst, const ScenarioSet& scen,
                           const FirstStageSolution& sol);
PolicyEvaluation eval_odco(const Instance& inst, const ScenarioSet& scen,
                           const FirstStageSolution& sol);
PolicyEvaluation eval_ro(const Instance& inst, const ScenarioSet& scen,
                         const FirstStageSolution& sol);
PolicyEvaluation evaluate(Policy policy, const Instance& inst, const ScenarioSet& scen,
                          const FirstStageSolution& sol);

/// Opening cost plus expected recourse.
double expected_total(const Instance& inst, const ScenarioSet& scen,
                      const FirstStageSolution& sol, Policy policy);

}  // namespace flpbd
