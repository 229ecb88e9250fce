#include <sstream>

#include "doctest.h"
#include "flpbd/solve.hpp"
#include "flpbd/xeval.hpp"
#include "test_support.hpp"

using namespace flpbd;

namespace {

struct Solved {
  Instance inst;
  ScenarioSet scen;
  PerPolicy<std::optional<FirstStageSolution>> sols;
  PerPolicy<std::optional<double>> optima;
};

Solved solve_all(std::uint64_t seed) {
  Rng rng(seed);
  testing::RandomInstanceOptions opt;
  opt.sites = 3;
  opt.customers = 6;
  opt.zero_lower_bounds = true;
  Solved s{testing::random_instance(rng, opt), {}, {}, {}};
  s.scen = testing::random_scenarios(rng, s.inst, 6, true);
  for (Policy p : kAllPolicies) {
    const auto r = brute_force(s.inst, s.scen, p);
    s.sols[policy_index(p)] = r.best_solution;
    s.optima[policy_index(p)] = r.z_upper;
  }
  return s;
}

}  // namespace

TEST_CASE("cross gaps: zero diagonal, nonnegative entries under proven optima") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = solve_all(seed);
    const auto m = cross_gap(s.inst, s.scen, s.sols, s.optima);
    for (Policy a : kAllPolicies) {
      CHECK(m.at(a, a) == 0.0);
      for (Policy b : kAllPolicies) {
        CHECK(m.at(a, b) >= -1e-9);
        CHECK_FALSE(m.flagged[policy_index(a)][policy_index(b)]);
      }
    }
  }
}

TEST_CASE("coincident optima give zero gaps") {
  auto s = solve_all(3);
  for (auto& sol : s.sols) sol = s.sols[0];
  for (Policy p : kAllPolicies) {
    s.optima[policy_index(p)] = expected_total(s.inst, s.scen, *s.sols[0], p);
  }
  const auto m = cross_gap(s.inst, s.scen, s.sols, s.optima);
  for (Policy a : kAllPolicies) {
    for (Policy b : kAllPolicies) CHECK(m.at(a, b) == 0.0);
  }
  CHECK_FALSE(m.asymmetric());
}

TEST_CASE("missing entries and flags") {
  auto s = solve_all(5);
  s.sols[1].reset();
  s.optima[2].reset();
  // A best-found optimum above the true one makes gaps negative.
  s.optima[3] = *s.optima[3] * 1.5;
  const auto m = cross_gap(s.inst, s.scen, s.sols, s.optima, {true, true, true, false});
  for (Policy b : kAllPolicies) CHECK(std::isnan(m.gap[1][policy_index(b)]));
  for (Policy a : kAllPolicies) CHECK(std::isnan(m.gap[policy_index(a)][2]));
  CHECK(m.gap[3][3] < 0.0);
  CHECK(m.flagged[3][3]);
  CHECK_FALSE(m.has(Policy::kCostDrivenOutsourcing, Policy::kFacilityOutsourcing));

  auto bad = solve_all(5);
  FirstStageSolution empty(bad.inst.n_sites, bad.inst.n_customers);
  bad.sols[0] = empty;
  CHECK_THROWS_AS(cross_gap(bad.inst, bad.scen, bad.sols, bad.optima), InfeasibleSolutionError);
}

TEST_CASE("gap summary excludes missing matrices") {
  const auto a = solve_all(7);
  auto b = solve_all(8);
  b.sols[0].reset();
  std::vector<GapMatrix> ms{cross_gap(a.inst, a.scen, a.sols, a.optima),
                            cross_gap(b.inst, b.scen, b.sols, b.optima)};
  const auto sum = summarize_gaps(ms);
  CHECK(sum.count[0][1] == 1);
  CHECK(sum.excluded[0][1] == 1);
  CHECK(sum.mean[0][1] == ms[0].gap[0][1]);
  CHECK(sum.count[1][0] == 2);
  CHECK(sum.mean[1][0] == doctest::Approx((ms[0].gap[1][0] + ms[1].gap[1][0]) / 2));
}

TEST_CASE("cost shares") {
  const auto s = solve_all(11);
  for (Policy p : kAllPolicies) {
    const auto ev = evaluate(p, s.inst, s.scen, *s.sols[policy_index(p)]);
    const auto cs = cost_breakdown(ev);
    CHECK(cs.opening + cs.service + cs.penalty + cs.reassign == doctest::Approx(1.0).epsilon(1e-12));
    for (double share : {cs.opening, cs.service, cs.penalty, cs.reassign}) {
      CHECK(share >= 0.0);
      CHECK(share <= 1.0);
    }
    if (p != Policy::kReassignmentOutsourcing) CHECK(cs.reassign == 0.0);
  }

  // Opening only.
  const std::size_t n = s.inst.n_customers;
  const auto none = make_scenario_set(n, {1.0}, std::vector<std::uint8_t>(n, 0), {{}});
  const auto cs = cost_breakdown(eval_fo(s.inst, none, *s.sols[0]));
  CHECK(cs.opening == 1.0);

  auto free = s.inst;
  for (auto& f : free.open_cost) f = 0.0;
  const auto zero = cost_breakdown(eval_fo(free, none, *s.sols[0]));
  CHECK(zero.zero_total);
  CHECK(zero.opening == 0.0);
}

TEST_CASE("open facility means") {
  const std::vector<int> site_of{0, 2, 2};
  const auto sol = FirstStageSolution::from_assignment(3, site_of);
  std::vector<PerPolicy<std::optional<FirstStageSolution>>> batch(1);
  batch[0][0] = sol;
  const auto st = open_facility_stats(batch);
  CHECK(st.mean[0] == 2.0);
  CHECK(std::isnan(st.mean[1]));

  batch[0] = {sol, sol, sol, sol};
  const auto eq = open_facility_stats(batch);
  for (double v : eq.mean) CHECK(v == eq.mean[0]);
  CHECK_THROWS_AS(open_facility_stats({}), InputError);
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(0.0) == "0");
  CHECK(csv_number(std::nan("")) == "");
  CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_number(1.0 / 3.0) == "0.333333333");
  const auto s = solve_all(2);
  std::ostringstream out;
  write_gap_csv(cross_gap(s.inst, s.scen, s.sols, s.optima), out);
  CHECK(out.str().rfind("solution_policy,FO,CD-CO,OD-CO,RO\n", 0) == 0);
}
