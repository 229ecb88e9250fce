#include <filesystem>
#include <limits>

#include "doctest.h"
#include "flpbd/instance.hpp"
#include "test_support.hpp"

using namespace flpbd;

namespace {

Instance two_by_three() {
  Instance inst;
  inst.n_sites = 2;
  inst.n_customers = 3;
  inst.open_cost = {10, 12};
  inst.min_assigned = {2, 0};
  inst.capacity = {2, 2};
  inst.serve_cost = {1, 2, 3, 4, 5, 6};
  inst.outsource_penalty = {8, 9};
  inst.external_cost = 20;
  inst.reassign_penalty = {1, 1, 1};
  inst.demand_prob = {0.5, 0.5, 0.5};
  return inst;
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate_instance flags ranges and counts") {
  auto inst = two_by_three();
  CHECK(validate_instance(inst).ok());

  auto bad_p = inst;
  bad_p.demand_prob[1] = 1.3;
  CHECK(mentions(validate_instance(bad_p).violations, "probability out of range"));

  auto bad_l = inst;
  bad_l.min_assigned = {3, 2};
  CHECK(mentions(validate_instance(bad_l).violations,
                 "assignment lower bounds exceed customer count"));

  auto short_c = inst;
  short_c.serve_cost.pop_back();
  CHECK_FALSE(validate_instance(short_c).ok());

  auto nan_cost = inst;
  nan_cost.external_cost = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(validate_instance(nan_cost).ok());

  // Idempotent.
  CHECK(validate_instance(bad_l).violations == validate_instance(bad_l).violations);
}

TEST_CASE("first-stage feasibility examples") {
  const auto inst = two_by_three();
  FirstStageSolution sol(2, 3);
  sol.set_open(0, true);
  for (int j = 0; j < 3; ++j) sol.set_assigned(0, j, true);
  CHECK(check_first_stage_feasible(inst, sol).feasible);

  // Customer 2 sent to the closed site.
  auto linked = sol;
  linked.set_assigned(0, 2, false);
  linked.set_assigned(1, 2, true);
  CHECK_FALSE(check_first_stage_feasible(inst, linked).feasible);

  // Unassigned and doubly assigned customers.
  auto missing = sol;
  missing.set_assigned(0, 1, false);
  CHECK_FALSE(check_first_stage_feasible(inst, missing).feasible);
  auto twice = sol;
  twice.set_open(1, true);
  twice.set_assigned(1, 0, true);
  CHECK_FALSE(check_first_stage_feasible(inst, twice).feasible);

  // Pigeonhole: both sites open with l = (2, 2) and three customers.
  auto tight = inst;
  tight.min_assigned = {2, 2};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const std::vector<int> site_of{a, b, c};
        auto s = FirstStageSolution::from_assignment(2, site_of);
        s.set_open(0, true);
        s.set_open(1, true);
        CHECK_FALSE(check_first_stage_feasible(tight, s).feasible);
      }
    }
  }

  FirstStageSolution wrong_dims(3, 3);
  CHECK_THROWS_AS(check_first_stage_feasible(inst, wrong_dims), InputError);
  CHECK_THROWS_AS(require_first_stage_feasible(inst, missing), InfeasibleSolutionError);
}

TEST_CASE("capacities never change first-stage feasibility") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    testing::RandomInstanceOptions opt;
    opt.sites = 1 + rng.below(4);
    opt.customers = 1 + rng.below(6);
    auto inst = testing::random_instance(rng, opt);
    FirstStageSolution sol(inst.n_sites, inst.n_customers);
    for (std::size_t i = 0; i < inst.n_sites; ++i) {
      sol.set_open(i, rng.uniform() < 0.5);
      for (std::size_t j = 0; j < inst.n_customers; ++j) {
        sol.set_assigned(i, j, rng.uniform() < 0.4);
      }
    }
    const bool before = check_first_stage_feasible(inst, sol).feasible;
    for (auto& k : inst.capacity) k = 1 + static_cast<int>(rng.below(10));
    CHECK(check_first_stage_feasible(inst, sol).feasible == before);
  }
}

TEST_CASE("solution helpers") {
  const std::vector<int> site_of{1, 1, 0};
  const auto sol = FirstStageSolution::from_assignment(3, site_of);
  CHECK(sol.open_count() == 2);
  CHECK_FALSE(sol.is_open(2));
  CHECK(sol.site_vector() == site_of);
  CHECK(opening_cost(two_by_three(), FirstStageSolution::from_assignment(2, site_of)) == 22.0);
}

TEST_CASE("instance and solution JSON round trip") {
  const auto inst = two_by_three();
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.serve_cost == inst.serve_cost);
  CHECK(back.min_assigned == inst.min_assigned);
  CHECK(back.external_cost == inst.external_cost);
  CHECK(back.demand_prob == inst.demand_prob);

  auto doc = instance_to_json(inst);
  doc["c"] = {1, 2, 3};
  CHECK_THROWS_AS(instance_from_json(doc), InputError);
  doc = instance_to_json(inst);
  doc.erase("p");
  CHECK_THROWS_AS(instance_from_json(doc), InputError);

  const std::vector<int> site_of{0, 0, 1};
  const auto sol = FirstStageSolution::from_assignment(2, site_of);
  CHECK(solution_from_json(solution_to_json(sol), 2, 3) == sol);

  const auto dir = std::filesystem::temp_directory_path() / "flpbd_instance_test";
  std::filesystem::create_directories(dir);
  save_instance(inst, dir / "inst.json");
  CHECK(load_instance(dir / "inst.json").open_cost == inst.open_cost);
  save_solution(sol, dir / "sol.json");
  CHECK(load_solution(dir / "sol.json", inst) == sol);
  std::filesystem::remove_all(dir);
}

TEST_CASE("policy names") {
  for (Policy p : kAllPolicies) {
    CHECK(parse_policy(policy_key(p)) == p);
    CHECK(parse_policy(policy_label(p)) == p);
  }
  CHECK(policy_label(Policy::kOrderDrivenOutsourcing) == "OD-CO");
  CHECK_THROWS_AS(parse_policy("xyz"), InputError);
}
