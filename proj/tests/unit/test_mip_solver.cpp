#include "doctest.h"
#include "flpbd/mip_solver.hpp"
#include "flpbd/recourse.hpp"
#include "test_support.hpp"

using namespace flpbd;
using namespace flpbd::milp;

TEST_CASE("knapsack-style binary program") {
  // max 5a + 4b + 3c s.t. 2a + 3b + c <= 4 (as a minimization).
  MilpModel model;
  const int a = model.add_variable("a", VarKind::kBinary, -5);
  const int b = model.add_variable("b", VarKind::kBinary, -4);
  const int c = model.add_variable("c", VarKind::kBinary, -3);
  model.add_constraint("w", {{a, 2}, {b, 3}, {c, 1}}, Sense::kLessEqual, 4);
  const auto r = solve_mip(model);
  REQUIRE(r.status == MipStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-8.0));
  CHECK(r.values[a] == 1.0);
  CHECK(r.values[b] == 0.0);
  CHECK(r.values[c] == 1.0);
}

TEST_CASE("continuous columns and equality rows") {
  // min x + 2y s.t. x + y = 3, x <= 1 via binary-free rows.
  MilpModel model;
  const int x = model.add_variable("x", VarKind::kContinuous, 1);
  const int y = model.add_variable("y", VarKind::kContinuous, 2);
  model.add_constraint("sum", {{x, 1}, {y, 1}}, Sense::kEqual, 3);
  model.add_constraint("cap", {{x, 1}}, Sense::kLessEqual, 1);
  const auto r = solve_mip(model);
  REQUIRE(r.status == MipStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(5.0));
}

TEST_CASE("infeasible programs") {
  MilpModel model;
  const int a = model.add_variable("a", VarKind::kBinary, 1);
  const int b = model.add_variable("b", VarKind::kBinary, 1);
  model.add_constraint("r", {{a, 1}, {b, 1}}, Sense::kGreaterEqual, 1.5);
  model.add_constraint("s", {{a, 1}, {b, -1}}, Sense::kEqual, 0.5);
  CHECK(solve_mip(model).status == MipStatus::kInfeasible);

  MilpModel fixed;
  const int c = fixed.add_variable("c", VarKind::kBinary, 1);
  fixed.add_constraint("r", {{c, 1}}, Sense::kGreaterEqual, 1);
  MipOptions opt;
  opt.fixed = {{c, 0.0}};
  CHECK(solve_mip(fixed, opt).status == MipStatus::kInfeasible);
}

TEST_CASE("policy models solve to the enumerated optimum on tiny data") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    testing::RandomInstanceOptions opt;
    opt.sites = 2;
    opt.customers = 3;
    const auto inst = testing::random_instance(rng, opt);
    const auto scen = testing::random_scenarios(rng, inst, 2, false);
    for (Policy p : kAllPolicies) {
      // Enumerate every feasible first stage with the oracle.
      double best = std::numeric_limits<double>::infinity();
      for (int code = 0; code < 27; ++code) {
        std::vector<int> site_of{code % 3, (code / 3) % 3, code / 9};
        if (site_of[0] == 2 || site_of[1] == 2 || site_of[2] == 2) continue;
        const auto sol = FirstStageSolution::from_assignment(2, site_of);
        if (!check_first_stage_feasible(inst, sol)) continue;
        best = std::min(best, testing::expected_cost_oracle(inst, scen, sol, p));
      }
      const auto r = solve_mip(build_model(p, inst, scen, true));
      if (!std::isfinite(best)) {
        CHECK(r.status == MipStatus::kInfeasible);
        continue;
      }
      REQUIRE(r.status == MipStatus::kOptimal);
      CHECK(approx_equal_rel(r.objective, best, 1e-9));
    }
  }
}

TEST_CASE("node limit stops the search") {
  Rng rng(2);
  testing::RandomInstanceOptions opt;
  opt.sites = 3;
  opt.customers = 6;
  const auto inst = testing::random_instance(rng, opt);
  const auto scen = testing::random_scenarios(rng, inst, 4, false);
  MipOptions mo;
  mo.node_limit = 1;
  const auto r = solve_mip(build_cdco(inst, scen), mo);
  CHECK(r.status != MipStatus::kInfeasible);
  CHECK(r.nodes <= std::max<std::int64_t>(1, r.components));
}
