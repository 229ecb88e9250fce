#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "flpbd/kernels.hpp"
#include "flpbd/scenario.hpp"
#include "test_support.hpp"

using namespace flpbd;

namespace {

Instance with_probs(std::vector<double> p, std::uint64_t seed = 5) {
  Rng rng(seed);
  testing::RandomInstanceOptions opt;
  opt.sites = 3;
  opt.customers = p.size();
  auto inst = testing::random_instance(rng, opt);
  inst.demand_prob = std::move(p);
  return inst;
}

bool is_permutation_of_demand(const ScenarioSet& s, std::size_t w) {
  std::vector<int> order(s.call_order(w).begin(), s.call_order(w).end());
  std::sort(order.begin(), order.end());
  const auto d = s.demand_customers(w);
  return std::equal(order.begin(), order.end(), d.begin(), d.end());
}

}  // namespace

TEST_CASE("make_scenario_set validates its invariants") {
  CHECK_NOTHROW(make_scenario_set(2, {0.5, 0.5}, {1, 0, 0, 1}, {{0}, {1}}));
  CHECK_THROWS_AS(make_scenario_set(2, {0.6, 0.5}, {1, 0, 0, 1}, {}), InputError);
  CHECK_THROWS_AS(make_scenario_set(2, {1.0, 0.0}, {1, 0, 0, 1}, {}), InputError);
  CHECK_THROWS_AS(make_scenario_set(2, {1.0}, {2, 0}, {}), InputError);
  CHECK_THROWS_AS(make_scenario_set(2, {1.0}, {1, 0}, {{1}}), InputError);
  CHECK_THROWS_AS(make_scenario_set(2, {1.0}, {1, 1}, {{1, 1}}), InputError);
  CHECK_THROWS_AS(make_scenario_set(2, {}, {}, {}), InputError);

  const auto s = make_scenario_set(2, {0.25, 0.75}, {1, 0, 1, 1}, {});
  CHECK_FALSE(s.has_call_orders());
  CHECK(s.empirical_prob()[0] == 1.0);
  CHECK(s.empirical_prob()[1] == 0.75);
}

TEST_CASE("demand_count") {
  const auto s = make_scenario_set(4, {0.5, 0.5}, {0, 0, 0, 0, 1, 0, 1, 1}, {});
  CHECK(demand_count(s, 0) == 0);
  CHECK(demand_count(s, 1) == 3);
  CHECK_THROWS_AS(demand_count(s, 2), std::out_of_range);
}

TEST_CASE("expected demand count equals the sum of empirical probabilities") {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    testing::RandomInstanceOptions opt;
    opt.customers = 2 + rng.below(7);
    const auto inst = testing::random_instance(rng, opt);
    const auto s = testing::random_scenarios(rng, inst, 1 + rng.below(16), t % 2 == 0, t % 3 == 0);
    double lhs = 0.0;
    for (std::size_t w = 0; w < s.size(); ++w) lhs += s.prob(w) * static_cast<double>(demand_count(s, w));
    const auto p = s.empirical_prob();
    CHECK(lhs == doctest::Approx(std::accumulate(p.begin(), p.end(), 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("independent sampler edge cases") {
  const auto zero = sample_independent(with_probs({0, 0, 0}), 6, 1);
  for (std::size_t w = 0; w < zero.size(); ++w) {
    CHECK(demand_count(zero, w) == 0);
    CHECK(zero.call_order(w).empty());
  }
  const auto ones = sample_independent(with_probs({1, 1}), 4, 1);
  for (std::size_t w = 0; w < 4; ++w) {
    CHECK(demand_count(ones, w) == 2);
    CHECK(is_permutation_of_demand(ones, w));
    CHECK(ones.prob(w) == 0.25);
  }
  CHECK_THROWS_AS(sample_independent(with_probs({0.5}), 0, 1), InputError);
}

TEST_CASE("independent sampler law of large numbers") {
  const auto s = sample_independent(with_probs(std::vector<double>(8, 0.5)), 10000, 17);
  for (double p : s.empirical_prob()) CHECK(std::abs(p - 0.5) < 0.02);
}

TEST_CASE("correlation weights") {
  CHECK(correlation_weight(5.0, 10.0) == 1.0);
  CHECK(correlation_weight(10.0, 10.0) == doctest::Approx(0.0));
  CHECK(correlation_weight(0.0, 10.0) == 2.0);
  // Real cube root below the midpoint.
  CHECK(correlation_weight(7.5, 10.0) == doctest::Approx(1.0 - std::cbrt(0.5)));

  auto inst = with_probs({0.3, 0.3, 0.3});
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    inst.serve_cost[i * 3 + 1] = inst.serve_cost[i * 3 + 0];
  }
  const auto spec = build_correlation_spec(inst);
  CHECK(spec.delta[0 * 3 + 1] == 0.1);
  CHECK(spec.delta[1 * 3 + 1] == 0.1);
  for (std::size_t j = 0; j < 3; ++j) {
    double sq = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sq += spec.weights[j * 3 + k] * spec.weights[j * 3 + k];
    CHECK(spec.norm[j] * spec.norm[j] == doctest::Approx(sq).epsilon(1e-14));
  }

  CHECK_THROWS_AS(build_correlation_spec(with_probs({0.5})), InputError);
  auto flat = with_probs({0.5, 0.5});
  for (std::size_t i = 0; i < flat.n_sites; ++i) flat.serve_cost[i * 2 + 1] = flat.serve_cost[i * 2];
  CHECK_THROWS_AS(build_correlation_spec(flat), InputError);
}

TEST_CASE("correlated sampler edge cases and reproducibility") {
  const auto zero = sample_correlated(with_probs({0, 0, 0, 0}), 50, 3);
  for (std::size_t w = 0; w < zero.size(); ++w) CHECK(demand_count(zero, w) == 0);
  const auto ones = sample_correlated(with_probs({1, 1, 1}), 50, 3);
  for (std::size_t w = 0; w < ones.size(); ++w) CHECK(demand_count(ones, w) == 3);

  const auto inst = with_probs({0.2, 0.5, 0.7, 0.9, 0.4});
  const auto a = sample_correlated(inst, 40, 8);
  const auto b = sample_correlated(inst, 40, 8);
  for (std::size_t w = 0; w < 40; ++w) {
    CHECK(std::ranges::equal(a.demand_row(w), b.demand_row(w)));
    CHECK(std::ranges::equal(a.call_order(w), b.call_order(w)));
    CHECK(is_permutation_of_demand(a, w));
  }
}

TEST_CASE("sampling does not depend on the SIMD backend") {
  const auto inst = with_probs({0.2, 0.5, 0.7, 0.9, 0.4, 0.1, 0.6});
  const auto original = kernels::active_backend();
  kernels::set_backend(kernels::Backend::kScalar);
  const auto ref = sample_correlated(inst, 200, 12);
  kernels::set_backend(original);
  const auto fast = sample_correlated(inst, 200, 12);
  for (std::size_t w = 0; w < 200; ++w) {
    CHECK(std::ranges::equal(ref.demand_row(w), fast.demand_row(w)));
  }
}

TEST_CASE("scenario JSON round trip and compatibility") {
  const auto inst = with_probs({0.2, 0.5, 0.7});
  const auto s = sample_independent(inst, 5, 2);
  const auto back = scenarios_from_json(scenarios_to_json(s));
  REQUIRE(back.size() == s.size());
  for (std::size_t w = 0; w < s.size(); ++w) {
    CHECK(back.prob(w) == s.prob(w));
    CHECK(std::ranges::equal(back.demand_row(w), s.demand_row(w)));
    CHECK(std::ranges::equal(back.call_order(w), s.call_order(w)));
  }
  CHECK_NOTHROW(require_compatible(inst, s));
  CHECK_THROWS_AS(require_compatible(with_probs({0.5, 0.5}), s), InputError);

  auto doc = scenarios_to_json(s);
  doc["demand"][0][0] = 3;
  CHECK_THROWS_AS(scenarios_from_json(doc), InputError);
}
