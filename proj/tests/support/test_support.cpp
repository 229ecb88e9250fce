#include "test_support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace flpbd::testing {
namespace {

double two_decimals(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

Instance random_instance(Rng& rng, const RandomInstanceOptions& opt) {
  Instance inst;
  const std::size_t m = opt.sites;
  const std::size_t n = opt.customers;
  inst.n_sites = m;
  inst.n_customers = n;
  inst.serve_cost.resize(m * n);
  for (auto& c : inst.serve_cost) c = two_decimals(rng.uniform(1.0, 100.0));
  for (std::size_t i = 0; i < m; ++i) {
    inst.open_cost.push_back(two_decimals(rng.uniform(10.0, 200.0)));
    inst.capacity.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_capacity))));
    const auto row = inst.cost_row(i);
    const double worst = *std::max_element(row.begin(), row.end());
    const double g = rng.uniform() < opt.cheap_penalty_prob ? rng.uniform(1.0, worst)
                                                            : rng.uniform(worst, 2.0 * worst);
    inst.outsource_penalty.push_back(two_decimals(g));
  }
  // Lower bounds with sum at most n.
  inst.min_assigned.assign(m, 0);
  if (!opt.zero_lower_bounds) {
    const std::size_t budget = n / 2;
    for (std::size_t k = 0; k < budget; ++k) {
      if (rng.uniform() < 0.5) ++inst.min_assigned[rng.below(m)];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    inst.reassign_penalty.push_back(two_decimals(rng.uniform(0.0, 30.0)));
    inst.demand_prob.push_back(rng.uniform(0.05, 0.95));
  }
  inst.external_cost = two_decimals(rng.uniform(20.0, 200.0));
  return inst;
}

ScenarioSet random_scenarios(Rng& rng, const Instance& inst, std::size_t n_scenarios,
                             bool correlated, bool random_weights) {
  const auto seed = rng.next();
  if (!random_weights) {
    if (correlated && inst.n_customers >= 2) {
      try {
        return sample_correlated(inst, n_scenarios, seed);
      } catch (const InputError&) {
        // Degenerate pseudo-distances; fall back to independent draws.
      }
    }
    return sample_independent(inst, n_scenarios, seed);
  }
  const std::size_t n = inst.n_customers;
  std::vector<double> prob(n_scenarios);
  for (auto& p : prob) p = rng.uniform(0.1, 1.0);
  const double total = std::accumulate(prob.begin(), prob.end(), 0.0);
  for (auto& p : prob) p /= total;
  // Renormalize so that the sum is 1 to rounding.
  prob.back() = 1.0 - std::accumulate(prob.begin(), prob.end() - 1, 0.0);
  std::vector<std::uint8_t> demand(n_scenarios * n);
  std::vector<std::vector<int>> order(n_scenarios);
  for (std::size_t w = 0; w < n_scenarios; ++w) {
    for (std::size_t j = 0; j < n; ++j) {
      demand[w * n + j] = rng.uniform() < inst.demand_prob[j] ? 1 : 0;
      if (demand[w * n + j]) order[w].push_back(static_cast<int>(j));
    }
    rng.shuffle(std::span<int>(order[w]));
  }
  return make_scenario_set(n, std::move(prob), std::move(demand), std::move(order));
}

FirstStageSolution random_feasible_solution(Rng& rng, const Instance& inst) {
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> open;
    long required = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.uniform() < 0.6) {
        open.push_back(static_cast<int>(i));
        required += inst.min_assigned[i];
      }
    }
    if (open.empty() || required > static_cast<long>(n)) continue;
    std::vector<int> customers(n);
    std::iota(customers.begin(), customers.end(), 0);
    rng.shuffle(std::span<int>(customers));
    FirstStageSolution sol(m, n);
    std::size_t next = 0;
    for (int i : open) {
      sol.set_open(i, true);
      for (int k = 0; k < inst.min_assigned[i]; ++k) sol.set_assigned(i, customers[next++], true);
    }
    for (; next < n; ++next) {
      sol.set_assigned(open[rng.below(open.size())], customers[next], true);
    }
    return sol;
  }
  return {};
}

double cdco_site_enumeration(const std::vector<double>& costs, int capacity, double penalty) {
  const std::size_t k = costs.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    const int served = std::popcount(mask);
    if (served > capacity) continue;
    double cost = 0.0;
    for (std::size_t t = 0; t < k; ++t) cost += (mask >> t) & 1u ? costs[t] : penalty;
    best = std::min(best, cost);
  }
  return best;
}

double ro_scenario_enumeration(const Instance& inst, const std::vector<int>& site_of,
                               std::span<const std::uint8_t> is_open,
                               const std::vector<int>& demand_customers) {
  const std::size_t m = inst.n_sites;
  std::vector<int> open;
  for (std::size_t i = 0; i < m; ++i) {
    if (is_open[i]) open.push_back(static_cast<int>(i));
  }
  const std::size_t d = demand_customers.size();
  const std::size_t base = open.size() + 1;  // last label: external
  std::vector<std::size_t> label(d, 0);
  std::vector<int> load(m);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::fill(load.begin(), load.end(), 0);
    double cost = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < d && ok; ++k) {
      const int j = demand_customers[k];
      if (label[k] == open.size()) {
        cost += inst.external_cost;
        continue;
      }
      const int i = open[label[k]];
      if (++load[i] > inst.capacity[i]) ok = false;
      cost += inst.cost(i, j) + (i == site_of[j] ? 0.0 : inst.reassign_penalty[j]);
    }
    if (ok) best = std::min(best, cost);
    std::size_t k = 0;
    while (k < d && ++label[k] == base) label[k++] = 0;
    if (k == d) break;
  }
  return d == 0 ? 0.0 : best;
}

double expected_cost_oracle(const Instance& inst, const ScenarioSet& scen,
                            const FirstStageSolution& sol, Policy policy) {
  const std::size_t m = inst.n_sites;
  const auto site_of = sol.site_vector();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += sol.is_open(i) ? inst.open_cost[i] : 0.0;
  for (std::size_t w = 0; w < scen.size(); ++w) {
    double cost = 0.0;
    if (policy == Policy::kReassignmentOutsourcing) {
      std::vector<int> demand(scen.demand_customers(w).begin(), scen.demand_customers(w).end());
      cost = ro_scenario_enumeration(inst, site_of, sol.open(), demand);
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> costs;
        std::vector<int> callers;
        if (policy == Policy::kOrderDrivenOutsourcing) {
          for (int j : scen.call_order(w)) {
            if (site_of[j] == static_cast<int>(i)) callers.push_back(j);
          }
        } else {
          for (int j : scen.demand_customers(w)) {
            if (site_of[j] == static_cast<int>(i)) callers.push_back(j);
          }
        }
        for (int j : callers) costs.push_back(inst.cost(i, j));
        const int eta = static_cast<int>(callers.size());
        const double g = inst.outsource_penalty[i];
        switch (policy) {
          case Policy::kFacilityOutsourcing:
            cost += std::accumulate(costs.begin(), costs.end(), 0.0) +
                    g * std::max(0, eta - inst.capacity[i]);
            break;
          case Policy::kCostDrivenOutsourcing:
            cost += cdco_site_enumeration(costs, inst.capacity[i], g);
            break;
          case Policy::kOrderDrivenOutsourcing:
            for (int k = 0; k < eta; ++k) cost += k < inst.capacity[i] ? costs[k] : g;
            break;
          default:
            break;
        }
      }
    }
    total += scen.prob(w) * cost;
  }
  return total;
}

}  // namespace flpbd::testing
