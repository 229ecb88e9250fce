#include "flpbd/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace flpbd {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

FirstStageSolution make_solution(const Instance& inst, std::span<const int> open,
                                 std::span<const int> site_of) {
  FirstStageSolution sol(inst.n_sites, inst.n_customers);
  for (std::size_t i = 0; i < inst.n_sites; ++i) sol.set_open(i, open[i] == 1);
  for (std::size_t j = 0; j < inst.n_customers; ++j) {
    sol.set_assigned(static_cast<std::size_t>(site_of[j]), j, true);
  }
  return sol;
}

// Finalizes a result around its best first stage: the reported upper bound
// is the evaluator's expected cost so that re-evaluations compare exactly.
void attach_solution(SolveResult& res, const Instance& inst, const ScenarioSet& scen,
                     FirstStageSolution sol) {
  res.evaluation = evaluate(res.policy, inst, scen, sol);
  res.z_upper = res.evaluation->expected_cost;
  res.best_solution = std::move(sol);
}

std::vector<std::uint8_t> open_flags(std::span<const int> open) {
  std::vector<std::uint8_t> flags(open.size());
  for (std::size_t i = 0; i < open.size(); ++i) flags[i] = open[i] == 1 ? 1 : 0;
  return flags;
}

double opening_of(const Instance& inst, std::span<const int> open) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    if (open[i] == 1) total += inst.open_cost[i];
  }
  return total;
}

Policy bounding_policy(Policy p) {
  // FIFO costs can drop when a customer is added, so partial OD-CO costs are
  // bounded through CD-CO, which is never more expensive.
  return p == Policy::kOrderDrivenOutsourcing ? Policy::kCostDrivenOutsourcing : p;
}

class Bounder {
 public:
  Bounder(const Instance& inst, const ScenarioSet& scen, Policy policy)
      : inst_(inst),
        policy_(policy),
        partial_(inst, scen, bounding_policy(policy)),
        p_hat_(scen.empirical_prob().begin(), scen.empirical_prob().end()) {}

  double operator()(const PartialFixing& f) const {
    const std::size_t m = inst_.n_sites;
    const std::size_t n = inst_.n_customers;
    double lb = opening_of(inst_, f.open);
    const bool sites_decided = std::none_of(f.open.begin(), f.open.end(), [](int v) { return v < 0; });
    bool any_assigned = false;
    for (std::size_t j = 0; j < n; ++j) any_assigned |= f.site_of[j] >= 0;
    if (sites_decided && any_assigned) {
      flags_ = open_flags(f.open);
      lb += partial_.expected_recourse(f.site_of, flags_);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (sites_decided && f.site_of[j] >= 0) continue;
      double unit = kInf;
      double cheapest = kInf;
      for (std::size_t i = 0; i < m; ++i) {
        if (f.open[i] == 0) continue;
        cheapest = std::min(cheapest, inst_.cost(i, j));
      }
      auto site_unit = [&](std::size_t i) {
        switch (policy_) {
          case Policy::kFacilityOutsourcing: return inst_.cost(i, j);
          case Policy::kCostDrivenOutsourcing:
          case Policy::kOrderDrivenOutsourcing:
            return std::min(inst_.cost(i, j), inst_.outsource_penalty[i]);
          case Policy::kReassignmentOutsourcing: return std::min(inst_.external_cost, cheapest);
        }
        return 0.0;
      };
      if (f.site_of[j] >= 0) {
        unit = f.open[f.site_of[j]] == 0 ? kInf : site_unit(static_cast<std::size_t>(f.site_of[j]));
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          if (f.open[i] != 0) unit = std::min(unit, site_unit(i));
        }
      }
      if (unit == kInf) return kInf;
      lb += p_hat_[j] * unit;
    }
    return lb;
  }

 private:
  const Instance& inst_;
  Policy policy_;
  RecourseEvaluator partial_;
  std::vector<double> p_hat_;
  mutable std::vector<std::uint8_t> flags_;
};

// Lower-bound constraints can still be met by the undecided customers.
bool lower_bounds_reachable(const Instance& inst, const PartialFixing& f) {
  std::vector<int> count(inst.n_sites, 0);
  int free_customers = 0;
  for (int s : f.site_of) {
    if (s >= 0) ++count[s];
    else ++free_customers;
  }
  long deficit = 0;
  long required = 0;
  bool any_possible = false;
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    if (f.open[i] == 1) {
      deficit += std::max(0, inst.min_assigned[i] - count[i]);
      required += inst.min_assigned[i];
    }
    if (f.open[i] != 0) any_possible = true;
    if (f.open[i] == 0 && count[i] > 0) return false;
  }
  if (inst.n_customers > 0 && !any_possible) return false;
  return required <= static_cast<long>(inst.n_customers) && deficit <= free_customers;
}

}  // namespace

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kMemoryLimit: return "memory-limit";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

double gap_pct(double z_upper, double z_lower) {
  if (z_upper == z_lower && std::isfinite(z_upper)) return 0.0;
  if (!std::isfinite(z_upper) || !std::isfinite(z_lower) || z_lower <= 0.0) return kInf;
  return 100.0 * (z_upper - z_lower) / z_lower;
}

SolveResult brute_force(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const BruteForceGuards& guards) {
  return brute_force(inst, scen, policy, PartialFixing::none(inst), guards);
}

SolveResult brute_force(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const PartialFixing& fixing, const BruteForceGuards& guards) {
  if (inst.n_sites > guards.max_sites || inst.n_customers > guards.max_customers ||
      scen.size() > guards.max_scenarios) {
    throw InputError("brute force size guard exceeded");
  }
  if (fixing.open.size() != inst.n_sites || fixing.site_of.size() != inst.n_customers) {
    throw InputError("partial fixing does not match the instance");
  }
  const auto start = Clock::now();
  SolveResult res;
  res.policy = policy;
  RecourseEvaluator eval(inst, scen, policy);
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;

  double best = kInf;
  std::vector<int> best_open, best_site;
  std::vector<int> open(m), site_of(n), count(m);
  std::vector<int> open_list;
  std::vector<std::size_t> free_customers;
  for (std::size_t j = 0; j < n; ++j) {
    if (fixing.site_of[j] < 0) free_customers.push_back(j);
  }

  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (mask == 0 && n > 0) continue;
    bool consistent = true;
    open_list.clear();
    long required = 0;
    for (std::size_t i = 0; i < m; ++i) {
      open[i] = (mask >> i) & 1u;
      if (fixing.open[i] >= 0 && fixing.open[i] != open[i]) consistent = false;
      if (open[i]) {
        open_list.push_back(static_cast<int>(i));
        required += inst.min_assigned[i];
      }
    }
    for (std::size_t j = 0; j < n && consistent; ++j) {
      if (fixing.site_of[j] >= 0 && !open[fixing.site_of[j]]) consistent = false;
    }
    if (!consistent || required > static_cast<long>(n)) continue;
    const auto flags = open_flags(open);
    const double opening = opening_of(inst, open);

    for (std::size_t j = 0; j < n; ++j) site_of[j] = fixing.site_of[j];
    std::vector<std::size_t> digit(free_customers.size(), 0);
    const std::size_t base = open_list.size();
    while (true) {
      for (std::size_t k = 0; k < free_customers.size(); ++k) {
        site_of[free_customers[k]] = open_list[digit[k]];
      }
      std::fill(count.begin(), count.end(), 0);
      for (std::size_t j = 0; j < n; ++j) ++count[site_of[j]];
      bool ok = true;
      for (int i : open_list) ok &= count[i] >= inst.min_assigned[i];
      if (ok) {
        ++res.stats.nodes;
        const double cost = opening + eval.expected_recourse(site_of, flags);
        if (cost < best) {
          best = cost;
          best_open = open;
          best_site = site_of;
        }
      }
      std::size_t k = 0;
      while (k < digit.size() && ++digit[k] == base) digit[k++] = 0;
      if (k == digit.size()) break;
    }
  }
  if (best < kInf) {
    res.status = SolveStatus::kOptimal;
    attach_solution(res, inst, scen, make_solution(inst, best_open, best_site));
    res.z_lower = res.z_upper;
  }
  res.stats.wall_seconds = seconds_since(start);
  return res;
}

std::optional<FirstStageSolution> greedy_solution(const Instance& inst, const ScenarioSet& scen) {
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;
  const auto p_hat = scen.empirical_prob();
  const double demand = std::accumulate(p_hat.begin(), p_hat.end(), 0.0);

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.open_cost[a] / inst.capacity[a] < inst.open_cost[b] / inst.capacity[b];
  });
  std::vector<int> open(m, 0);
  long required = 0;
  double capacity = 0.0;
  int n_open = 0;
  for (int i : order) {
    if (n_open > 0 && capacity >= demand) break;
    if (required + inst.min_assigned[i] > static_cast<long>(n)) continue;
    open[i] = 1;
    ++n_open;
    required += inst.min_assigned[i];
    capacity += inst.capacity[i];
  }
  if (n_open == 0) return std::nullopt;

  std::vector<int> site_of(n);
  std::vector<int> count(m, 0);
  for (std::size_t j = 0; j < n; ++j) {
    int best = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (open[i] && (best < 0 || inst.cost(i, j) < inst.cost(best, j))) best = static_cast<int>(i);
    }
    site_of[j] = best;
    ++count[best];
  }
  // Repair: move the cheapest-to-move customer from a surplus site into each
  // site below its lower bound.
  for (std::size_t i = 0; i < m; ++i) {
    while (open[i] && count[i] < inst.min_assigned[i]) {
      int move = -1;
      double extra = kInf;
      for (std::size_t j = 0; j < n; ++j) {
        const int from = site_of[j];
        if (from == static_cast<int>(i) || count[from] <= inst.min_assigned[from]) continue;
        const double delta = inst.cost(i, j) - inst.cost(from, j);
        if (delta < extra) {
          extra = delta;
          move = static_cast<int>(j);
        }
      }
      if (move < 0) return std::nullopt;
      --count[site_of[move]];
      site_of[move] = static_cast<int>(i);
      ++count[i];
    }
  }
  auto sol = make_solution(inst, open, site_of);
  if (!check_first_stage_feasible(inst, sol)) return std::nullopt;
  return sol;
}

double node_lower_bound(const Instance& inst, const ScenarioSet& scen, Policy policy,
                        const PartialFixing& fixing) {
  return Bounder(inst, scen, policy)(fixing);
}

SolveResult branch_and_bound(const Instance& inst, const ScenarioSet& scen, Policy policy,
                             const Limits& limits, const NodeObserver& observer) {
  const auto start = Clock::now();
  require_compatible(inst, scen);
  SolveResult res;
  res.policy = policy;
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;
  RecourseEvaluator exact(inst, scen, policy);
  Bounder bound(inst, scen, policy);
  const auto p_hat = scen.empirical_prob();

  // Site order: largest spread of expected service cost first.
  std::vector<double> spread(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, inst.cost(i, j));
    for (std::size_t i = 0; i < m; ++i) spread[i] += p_hat[j] * (worst - inst.cost(i, j));
  }
  std::vector<int> site_order(m);
  std::iota(site_order.begin(), site_order.end(), 0);
  std::stable_sort(site_order.begin(), site_order.end(),
                   [&](int a, int b) { return spread[a] > spread[b]; });
  std::vector<int> customer_order(n);
  std::iota(customer_order.begin(), customer_order.end(), 0);
  std::stable_sort(customer_order.begin(), customer_order.end(),
                   [&](int a, int b) { return p_hat[a] > p_hat[b]; });

  double incumbent = kInf;
  std::vector<int> best_open, best_site;
  if (auto greedy = greedy_solution(inst, scen)) {
    best_site = greedy->site_vector();
    best_open.resize(m);
    for (std::size_t i = 0; i < m; ++i) best_open[i] = greedy->is_open(i) ? 1 : 0;
    incumbent = opening_of(inst, best_open) + exact.expected_recourse(best_site, greedy->open());
  }

  struct Node {
    PartialFixing fixing;
    int depth;
    double parent_bound;
  };
  std::vector<Node> stack;
  {
    PartialFixing root = PartialFixing::none(inst);
    const double root_bound = bound(root);
    stack.push_back({std::move(root), 0, root_bound});
  }
  const int leaf_depth = static_cast<int>(m + n);
  std::optional<SolveStatus> stopped;
  std::vector<int> sites;

  while (!stack.empty()) {
    if (res.stats.nodes >= limits.max_nodes || seconds_since(start) >= limits.time_seconds) {
      stopped = SolveStatus::kTimeLimit;
      break;
    }
    if (stack.size() > limits.max_open_nodes) {
      stopped = SolveStatus::kMemoryLimit;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.parent_bound >= incumbent) continue;
    ++res.stats.nodes;
    if (!lower_bounds_reachable(inst, node.fixing)) continue;
    const double lb = bound(node.fixing);
    if (observer) observer({node.fixing, lb, node.depth});
    if (lb >= incumbent) continue;

    if (node.depth == leaf_depth) {
      double cost = lb;
      if (bounding_policy(policy) != policy) {
        const auto flags = open_flags(node.fixing.open);
        cost = opening_of(inst, node.fixing.open) +
               exact.expected_recourse(node.fixing.site_of, flags);
      }
      if (cost < incumbent) {
        incumbent = cost;
        best_open = node.fixing.open;
        best_site = node.fixing.site_of;
      }
      continue;
    }
    if (node.depth < static_cast<int>(m)) {
      const int i = site_order[node.depth];
      for (int value : {0, 1}) {  // pushed closed first so open is explored first
        Node child{node.fixing, node.depth + 1, lb};
        child.fixing.open[i] = value;
        stack.push_back(std::move(child));
      }
    } else {
      const int j = customer_order[node.depth - static_cast<int>(m)];
      sites.clear();
      for (std::size_t i = 0; i < m; ++i) {
        if (node.fixing.open[i] == 1) sites.push_back(static_cast<int>(i));
      }
      std::stable_sort(sites.begin(), sites.end(),
                       [&](int a, int b) { return inst.cost(a, j) < inst.cost(b, j); });
      for (auto it = sites.rbegin(); it != sites.rend(); ++it) {
        Node child{node.fixing, node.depth + 1, lb};
        child.fixing.site_of[j] = *it;
        stack.push_back(std::move(child));
      }
    }
  }

  if (!best_site.empty()) attach_solution(res, inst, scen, make_solution(inst, best_open, best_site));
  if (stopped) {
    res.status = *stopped;
    double lower = res.z_upper;
    for (const auto& node : stack) lower = std::min(lower, node.parent_bound);
    res.z_lower = lower;
  } else if (res.best_solution) {
    res.status = SolveStatus::kOptimal;
    res.z_lower = res.z_upper;
  } else {
    res.status = SolveStatus::kInfeasible;
  }
  res.stats.wall_seconds = seconds_since(start);
  return res;
}

}  // namespace flpbd
