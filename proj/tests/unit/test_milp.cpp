#include <sstream>

#include "doctest.h"
#include "flpbd/milp.hpp"
#include "flpbd/recourse.hpp"
#include "test_support.hpp"

using namespace flpbd;
using namespace flpbd::milp;

namespace {

struct Case {
  Instance inst;
  ScenarioSet scen;
};

Case random_case(Rng& rng, std::size_t m, std::size_t n, std::size_t w) {
  testing::RandomInstanceOptions opt;
  opt.sites = m;
  opt.customers = n;
  auto inst = testing::random_instance(rng, opt);
  auto scen = testing::random_scenarios(rng, inst, w, false);
  return {std::move(inst), std::move(scen)};
}

void check_same_model(const MilpModel& a, const MilpModel& b) {
  REQUIRE(a.num_variables() == b.num_variables());
  REQUIRE(a.num_constraints() == b.num_constraints());
  for (std::size_t k = 0; k < a.num_variables(); ++k) {
    CHECK(a.variables()[k].name == b.variables()[k].name);
    CHECK(a.variables()[k].kind == b.variables()[k].kind);
    CHECK(a.variables()[k].objective == b.variables()[k].objective);
  }
  for (std::size_t r = 0; r < a.num_constraints(); ++r) {
    const auto& x = a.constraints()[r];
    const auto& y = b.constraints()[r];
    CHECK(x.name == y.name);
    CHECK(x.sense == y.sense);
    CHECK(x.rhs == y.rhs);
    CHECK(x.terms == y.terms);
  }
}

}  // namespace

TEST_CASE("first-stage block sizes") {
  Rng rng(1);
  auto c = random_case(rng, 2, 3, 1);
  c.inst.min_assigned = {0, 0};
  const auto model = build_first_stage(c.inst);
  CHECK(model.num_variables() == 8);
  CHECK(model.num_binaries() == 8);
  CHECK(model.num_constraints() == 3 + 6 + 2);
  const auto& low = model.constraints()[model.num_constraints() - 1];
  CHECK(low.name == "low_1");
  CHECK(low.rhs == 0.0);
}

TEST_CASE("model sizes follow the closed forms") {
  Rng rng(3);
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t n = 1; n <= 4; ++n) {
      for (std::size_t w : {1u, 3u}) {
        const auto c = random_case(rng, m, n, w);
        const auto fo = build_fo(c.inst, c.scen, false);
        CHECK(fo.num_variables() == m * (1 + n) + w * (m + 1));
        CHECK(fo.num_constraints() == n * (1 + m) + m + w * (m + 1));
        CHECK(build_fo(c.inst, c.scen, true).num_constraints() == fo.num_constraints() + m + 1);
        const auto cd = build_cdco(c.inst, c.scen);
        CHECK(cd.num_variables() == fo.num_variables() + m * n * w);
        CHECK(cd.num_constraints() == n * (1 + 2 * m) + m + w * (2 * m + 1));
        std::size_t demand = 0;
        for (std::size_t k = 0; k < w; ++k) demand += demand_count(c.scen, k);
        const auto od = build_odco(c.inst, c.scen);
        CHECK(od.num_variables() == cd.num_variables());
        CHECK(od.num_constraints() == cd.num_constraints() + m * demand);
        const auto ro = build_ro(c.inst, c.scen);
        CHECK(ro.num_variables() == m * (1 + n) + m * n * w + 2 * n * w);
        CHECK(ro.num_constraints() == n * (1 + m) + m + m * w + m * n * w + n * w);
      }
    }
  }
}

TEST_CASE("FO objective and cut rows") {
  Rng rng(4);
  const auto c = random_case(rng, 2, 3, 4);
  const auto fo = build_fo(c.inst, c.scen, true);
  const auto phat = c.scen.empirical_prob();
  CHECK(fo.variables()[fo.column("x_1_2")].objective == phat[2] * c.inst.cost(1, 2));
  CHECK(fo.variables()[fo.column("y_0")].objective == c.inst.open_cost[0]);
  CHECK(fo.variables()[fo.column("z_3")].objective == c.scen.prob(3));
  CHECK(fo.find("cexp_1").has_value() == false);  // rows are not columns
  std::size_t widest = 0;
  for (std::size_t w = 1; w < c.scen.size(); ++w) {
    if (demand_count(c.scen, w) > demand_count(c.scen, widest)) widest = w;
  }
  const auto& cmax = fo.constraints().back();
  CHECK(cmax.name == "cmax");
  CHECK(cmax.rhs == static_cast<double>(demand_count(c.scen, widest)));
}

TEST_CASE("OD-CO rows of a lone caller have no predecessors") {
  Rng rng(5);
  auto c = random_case(rng, 2, 3, 1);
  c.scen = make_scenario_set(3, {1.0}, {0, 1, 0}, {{1}});
  const auto od = build_odco(c.inst, c.scen);
  for (const auto& row : od.constraints()) {
    if (row.name.rfind("ord_", 0) != 0) continue;
    CHECK(row.terms.size() == 2);  // K x - K s only
  }
  CHECK_THROWS_AS(build_odco(c.inst, make_scenario_set(3, {1.0}, {0, 1, 0}, {})), InputError);
}

TEST_CASE("RO activation rows pin non-demand customers") {
  Rng rng(6);
  auto c = random_case(rng, 2, 2, 1);
  c.scen = make_scenario_set(2, {1.0}, {1, 0}, {{0}});
  const auto ro = build_ro(c.inst, c.scen);
  for (const auto& row : ro.constraints()) {
    if (row.name == "act_0_1_0" || row.name == "act_1_1_0") {
      CHECK(row.terms.size() == 1);
      CHECK(row.rhs == 0.0);
    }
  }
}

TEST_CASE("induced values are feasible and priced at the evaluator's cost") {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_case(rng, 1 + rng.below(3), 1 + rng.below(5), 1 + rng.below(4));
    const auto sol = testing::random_feasible_solution(rng, c.inst);
    if (sol.n_sites() == 0) continue;
    for (Policy p : kAllPolicies) {
      const auto model = build_model(p, c.inst, c.scen, true);
      const auto values = induced_values(model, p, c.inst, c.scen, sol);
      CHECK(model.max_violation(values) <= 1e-9);
      CHECK(approx_equal_rel(model.objective_value(values), expected_total(c.inst, c.scen, sol, p), 1e-12));
      CHECK(first_stage_from_values(model, c.inst, values) == sol);
    }
  }
}

TEST_CASE("constraint assembly") {
  MilpModel model("m");
  const int a = model.add_variable("a", VarKind::kBinary, 1.0);
  const int b = model.add_variable("b", VarKind::kContinuous);
  CHECK_THROWS_AS(model.add_variable("a", VarKind::kBinary), InputError);
  model.add_constraint("r", {{b, 2.0}, {a, 1.0}, {b, -2.0}, {a, 0.5}}, Sense::kLessEqual, 3.0);
  CHECK(model.constraints()[0].terms == std::vector<Term>{{a, 1.5}});
  CHECK_THROWS_AS(model.add_constraint("r", {}, Sense::kEqual, 0.0), InputError);
  CHECK_THROWS_AS(model.add_constraint("q", {{7, 1.0}}, Sense::kEqual, 0.0), InputError);
  CHECK_THROWS_AS(model.column("nope"), InputError);
  const std::vector<double> v{1.0, 0.5};
  CHECK(model.objective_value(v) == 1.0);
  CHECK(model.max_violation(std::vector<double>{0.5, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("MPS and LP round trips") {
  Rng rng(9);
  const auto c = random_case(rng, 2, 3, 3);
  for (Policy p : kAllPolicies) {
    const auto model = build_model(p, c.inst, c.scen, true);
    std::stringstream mps;
    write_mps(model, mps);
    check_same_model(model, read_mps(mps));
    std::stringstream lp;
    write_lp(model, lp);
    const auto text = lp.str();
    check_same_model(model, read_lp(lp));

    // Each nonzero objective coefficient appears exactly once.
    const auto obj_end = text.find("Subject To");
    const auto objective = text.substr(0, obj_end);
    for (const auto& v : model.variables()) {
      if (v.objective == 0.0) continue;
      std::size_t hits = 0;
      for (auto pos = objective.find(" " + v.name); pos != std::string::npos;
           pos = objective.find(" " + v.name, pos + 1)) {
        const char next = pos + v.name.size() + 1 < objective.size() ? objective[pos + v.name.size() + 1] : '\n';
        if (next == ' ' || next == '\n') ++hits;
      }
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("readers reject malformed files") {
  std::istringstream ranges("NAME x\nROWS\n N obj\n L r\nCOLUMNS\n a r 1\nRHS\nRANGES\n R r 1\nENDATA\n");
  CHECK_THROWS_AS(read_mps(ranges), InputError);
  std::istringstream general("Minimize\n obj: a\nSubject To\n r: a >= 1\nGeneral\n a\nEnd\n");
  CHECK_THROWS_AS(read_lp(general), InputError);
}
