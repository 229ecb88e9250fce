#pragma once

#include <cstdint>
#include <vector>

#include "flpbd/instance.hpp"
#include "flpbd/random.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd::testing {

struct RandomInstanceOptions {
  std::size_t sites = 3;
  std::size_t customers = 5;
  int max_capacity = 3;
  /// Probability that a site's outsourcing penalty is drawn below some of its
  /// service costs (exercises the CD-CO "outsource although slack" branch).
  double cheap_penalty_prob = 0.3;
  bool zero_lower_bounds = false;
};

/// Random valid instance; costs have two decimals.
Instance random_instance(Rng& rng, const RandomInstanceOptions& opt);

/// Random scenario set with call orders: independent or correlated sampling
/// with equal weights, or (when `random_weights`) Bernoulli draws with
/// random positive scenario weights.
ScenarioSet random_scenarios(Rng& rng, const Instance& inst, std::size_t n_scenarios,
                             bool correlated, bool random_weights = false);

/// Uniformly random first-stage feasible solution, or an empty optional-like
/// solution (n_sites() == 0) if the lower bounds make the draw fail.
FirstStageSolution random_feasible_solution(Rng& rng, const Instance& inst);

// Independent oracles.

/// min over S subset of costs with |S| <= capacity of sum_S c + g (|costs| - |S|).
double cdco_site_enumeration(const std::vector<double>& costs, int capacity, double penalty);

/// Enumerates every labeling of the demand customers (any open site or
/// external) that respects capacities and returns the cheapest cost.
double ro_scenario_enumeration(const Instance& inst, const std::vector<int>& site_of,
                               std::span<const std::uint8_t> open,
                               const std::vector<int>& demand_customers);

/// Expected total cost computed straight from the policy definitions, with
/// per-site subset enumeration for CD-CO and labeling enumeration for RO.
double expected_cost_oracle(const Instance& inst, const ScenarioSet& scen,
                            const FirstStageSolution& sol, Policy policy);

}  // namespace flpbd::testing
