#include "flpbd/recourse.hpp"

#include <algorithm>

namespace flpbd {

RecourseEvaluator::RecourseEvaluator(const Instance& inst, const ScenarioSet& scen,
                                     Policy policy)
    : inst_(inst), scen_(scen), policy_(policy) {
  require_compatible(inst, scen);
  if (policy == Policy::kOrderDrivenOutsourcing && !scen.has_call_orders()) {
    throw InputError("OD-CO evaluation needs call orders in the scenario set");
  }
  count_.resize(inst.n_sites);
  by_site_.resize(inst.n_sites);
}

double RecourseEvaluator::scenario_cost(std::size_t w, std::span<const int> site_of,
                                        std::span<const std::uint8_t> open,
                                        ScenarioOutcome* outcome) const {
  if (outcome) {
    outcome->served.assign(inst_.n_customers, kNoDemand);
    outcome->n_outsourced_at.assign(inst_.n_sites, 0);
    outcome->service_cost = outcome->penalty_cost = outcome->reassign_cost = 0.0;
  }
  switch (policy_) {
    case Policy::kFacilityOutsourcing: return fo_cost(w, site_of, outcome);
    case Policy::kCostDrivenOutsourcing: return cdco_cost(w, site_of, outcome);
    case Policy::kOrderDrivenOutsourcing: return odco_cost(w, site_of, outcome);
    case Policy::kReassignmentOutsourcing: return ro_cost(w, site_of, open, outcome);
  }
  return 0.0;
}

double RecourseEvaluator::expected_recourse(std::span<const int> site_of,
                                            std::span<const std::uint8_t> open) const {
  double total = 0.0;
  for (std::size_t w = 0; w < scen_.size(); ++w) {
    total += scen_.prob(w) * scenario_cost(w, site_of, open);
  }
  return total;
}

double RecourseEvaluator::fo_cost(std::size_t w, std::span<const int> site_of,
                                  ScenarioOutcome* out) const {
  std::fill(count_.begin(), count_.end(), 0);
  double service = 0.0;
  for (int j : scen_.demand_customers(w)) {
    const int i = site_of[j];
    if (i < 0) continue;
    service += inst_.cost(i, j);
    ++count_[i];
    if (out) out->served[j] = i;
  }
  double penalty = 0.0;
  for (std::size_t i = 0; i < inst_.n_sites; ++i) {
    const int over = count_[i] - inst_.capacity[i];
    if (over > 0) {
      penalty += inst_.outsource_penalty[i] * over;
      if (out) out->n_outsourced_at[i] = over;
    }
  }
  if (out) {
    out->service_cost = service;
    out->penalty_cost = penalty;
  }
  return service + penalty;
}

double RecourseEvaluator::cdco_cost(std::size_t w, std::span<const int> site_of,
                                    ScenarioOutcome* out) const {
  for (auto& list : by_site_) list.clear();
  for (int j : scen_.demand_customers(w)) {
    if (site_of[j] >= 0) by_site_[site_of[j]].push_back(j);
  }
  double service = 0.0;
  double penalty = 0.0;
  for (std::size_t i = 0; i < inst_.n_sites; ++i) {
    auto& list = by_site_[i];
    if (list.empty()) continue;
    // Cheapest first; equal costs keep ascending customer order.
    std::stable_sort(list.begin(), list.end(),
                     [&](int a, int b) { return inst_.cost(i, a) < inst_.cost(i, b); });
    const double g = inst_.outsource_penalty[i];
    int served = 0;
    for (int j : list) {
      const double c = inst_.cost(i, j);
      if (served < inst_.capacity[i] && c <= g) {
        service += c;
        ++served;
        if (out) out->served[j] = static_cast<int>(i);
      } else {
        penalty += g;
        if (out) {
          out->served[j] = kOutsourced;
          ++out->n_outsourced_at[i];
        }
      }
    }
  }
  if (out) {
    out->service_cost = service;
    out->penalty_cost = penalty;
  }
  return service + penalty;
}

double RecourseEvaluator::odco_cost(std::size_t w, std::span<const int> site_of,
                                    ScenarioOutcome* out) const {
  std::fill(count_.begin(), count_.end(), 0);
  double service = 0.0;
  double penalty = 0.0;
  for (int j : scen_.call_order(w)) {
    const int i = site_of[j];
    if (i < 0) continue;
    if (count_[i] < inst_.capacity[i]) {
      ++count_[i];
      service += inst_.cost(i, j);
      if (out) out->served[j] = i;
    } else {
      penalty += inst_.outsource_penalty[i];
      if (out) {
        out->served[j] = kOutsourced;
        ++out->n_outsourced_at[i];
      }
    }
  }
  if (out) {
    out->service_cost = service;
    out->penalty_cost = penalty;
  }
  return service + penalty;
}

double RecourseEvaluator::ro_cost(std::size_t w, std::span<const int> site_of,
                                  std::span<const std::uint8_t> open,
                                  ScenarioOutcome* out) const {
  members_.clear();
  for (int j : scen_.demand_customers(w)) {
    if (site_of[j] >= 0) members_.push_back(j);
  }
  const int d = static_cast<int>(members_.size());
  if (d == 0) return 0.0;

  const int m = static_cast<int>(inst_.n_sites);

  // If every customer's cheapest option fits the capacities, that choice is
  // optimal and the flow is not needed.
  std::fill(count_.begin(), count_.end(), 0);
  choice_.resize(d);
  bool fits = true;
  for (int k = 0; k < d && fits; ++k) {
    const int j = members_[k];
    const int own = site_of[j];
    int best = own;
    double best_cost = inst_.cost(own, j);
    for (int i = 0; i < m; ++i) {
      if (!open[i] || i == own) continue;
      const double c = inst_.cost(i, j) + inst_.reassign_penalty[j];
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    if (inst_.external_cost < best_cost) best = kOutsourced;
    choice_[k] = best;
    if (best >= 0 && ++count_[best] > inst_.capacity[best]) fits = false;
  }
  if (!fits) {
    const int source = 0;
    const int first_site = d + 1;
    const int external = d + m + 1;
    const int sink = d + m + 2;
    flow_.reset(d + m + 3);
    customer_arc_.assign(static_cast<std::size_t>(d) * (m + 1), -1);
    for (int k = 0; k < d; ++k) {
      const int j = members_[k];
      flow_.add_arc(source, 1 + k, 1, 0.0);
      for (int i = 0; i < m; ++i) {
        if (!open[i]) continue;
        const double cost =
            inst_.cost(i, j) + (i == site_of[j] ? 0.0 : inst_.reassign_penalty[j]);
        customer_arc_[k * (m + 1) + i] = flow_.add_arc(1 + k, first_site + i, 1, cost);
      }
      customer_arc_[k * (m + 1) + m] = flow_.add_arc(1 + k, external, 1, inst_.external_cost);
    }
    for (int i = 0; i < m; ++i) {
      if (open[i]) flow_.add_arc(first_site + i, sink, inst_.capacity[i], 0.0);
    }
    flow_.add_arc(external, sink, d, 0.0);
    flow_.solve(source, sink, d);
    for (int k = 0; k < d; ++k) {
      choice_[k] = kOutsourced;
      for (int i = 0; i < m; ++i) {
        const int arc = customer_arc_[k * (m + 1) + i];
        if (arc >= 0 && flow_.flow_on(arc) > 0) {
          choice_[k] = i;
          break;
        }
      }
    }
  }

  // Costs are re-summed from the arc choices in customer order.
  double service = 0.0;
  double penalty = 0.0;
  double reassign = 0.0;
  for (int k = 0; k < d; ++k) {
    const int j = members_[k];
    const int chosen = choice_[k];
    if (chosen == kOutsourced) {
      penalty += inst_.external_cost;
      if (out) ++out->n_outsourced_at[site_of[j]];
    } else {
      service += inst_.cost(chosen, j);
      if (chosen != site_of[j]) reassign += inst_.reassign_penalty[j];
    }
    if (out) out->served[j] = chosen;
  }
  if (out) {
    out->service_cost = service;
    out->penalty_cost = penalty;
    out->reassign_cost = reassign;
  }
  return service + penalty + reassign;
}

PolicyEvaluation evaluate(Policy policy, const Instance& inst, const ScenarioSet& scen,
                          const FirstStageSolution& sol) {
  require_first_stage_feasible(inst, sol);
  RecourseEvaluator engine(inst, scen, policy);
  const auto site_of = sol.site_vector();

  PolicyEvaluation ev;
  ev.policy = policy;
  ev.per_scenario.resize(scen.size());
  ev.breakdown.opening = opening_cost(inst, sol);
  for (std::size_t w = 0; w < scen.size(); ++w) {
    auto& outcome = ev.per_scenario[w];
    engine.scenario_cost(w, site_of, sol.open(), &outcome);
    const double pi = scen.prob(w);
    ev.breakdown.service += pi * outcome.service_cost;
    ev.breakdown.penalty += pi * outcome.penalty_cost;
    ev.breakdown.reassign += pi * outcome.reassign_cost;
  }
  ev.expected_cost = ev.breakdown.total();
  return ev;
}

PolicyEvaluation eval_fo(const Instance& inst, const ScenarioSet& scen,
                         const FirstStageSolution& sol) {
  return evaluate(Policy::kFacilityOutsourcing, inst, scen, sol);
}

PolicyEvaluation eval_cdco(const Instance& inst, const ScenarioSet& scen,
                           const FirstStageSolution& sol) {
  return evaluate(Policy::kCostDrivenOutsourcing, inst, scen, sol);
}

PolicyEvaluation eval_odco(const Instance& inst, const ScenarioSet& scen,
                           const FirstStageSolution& sol) {
  return evaluate(Policy::kOrderDrivenOutsourcing, inst, scen, sol);
}

PolicyEvaluation eval_ro(const Instance& inst, const ScenarioSet& scen,
                         const FirstStageSolution& sol) {
  return evaluate(Policy::kReassignmentOutsourcing, inst, scen, sol);
}

double expected_total(const Instance& inst, const ScenarioSet& scen,
                      const FirstStageSolution& sol, Policy policy) {
  return evaluate(policy, inst, scen, sol).expected_cost;
}

}  // namespace flpbd
