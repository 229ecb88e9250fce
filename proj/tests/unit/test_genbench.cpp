#include <sstream>

#include "doctest.h"
#include "flpbd/genbench.hpp"

using namespace flpbd;

namespace {

GeneratorConfig base_config(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.coords = synthetic_coords(80, 4);
  cfg.n_sites = 5;
  cfg.n_customers = 30;
  cfg.seed = seed;
  return cfg;
}

struct Counts {
  int low = 0, medium = 0, high = 0;
};

Counts classify(const Instance& inst) {
  Counts c;
  for (double p : inst.demand_prob) {
    if (p < 0.4) ++c.low;
    else if (p < 0.7) ++c.medium;
    else ++c.high;
  }
  return c;
}

}  // namespace

TEST_CASE("class counts per pattern") {
  const auto pt1 = class_counts(DemandPattern::kPT1, 30);
  CHECK(pt1.low == 6);
  CHECK(pt1.medium == 18);
  CHECK(pt1.high == 6);
  const auto pt2 = class_counts(DemandPattern::kPT2, 30);
  CHECK(pt2.low == 6);
  CHECK(pt2.medium == 6);
  CHECK(pt2.high == 18);
  for (std::size_t n = 1; n < 40; ++n) {
    for (auto p : {DemandPattern::kPT1, DemandPattern::kPT2}) {
      const auto c = class_counts(p, n);
      CHECK(c.low + c.medium + c.high == n);
    }
  }
}

TEST_CASE("generated probabilities fall into their classes") {
  auto cfg = base_config(3);
  const auto pt1 = classify(generate_instance(cfg));
  CHECK(pt1.low == 6);
  CHECK(pt1.medium == 18);
  CHECK(pt1.high == 6);
  cfg.pattern = DemandPattern::kPT2;
  const auto pt2 = classify(generate_instance(cfg));
  CHECK(pt2.low == 6);
  CHECK(pt2.medium == 6);
  CHECK(pt2.high == 18);
}

TEST_CASE("gamma scales capacities exactly") {
  auto cfg = base_config(9);
  const auto one = generate_instance(cfg);
  cfg.gamma = 4;
  const auto four = generate_instance(cfg);
  for (std::size_t i = 0; i < one.n_sites; ++i) CHECK(four.capacity[i] == 4 * one.capacity[i]);
  CHECK(four.serve_cost == one.serve_cost);
}

TEST_CASE("generator is deterministic and produces valid instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = base_config(seed);
    cfg.setup_variability = static_cast<SetupVariability>(seed % 3);
    cfg.ell_mode = seed % 2 ? LowerBoundMode::kZero : LowerBoundMode::kPositive;
    const auto a = generate_instance(cfg);
    const auto b = generate_instance(cfg);
    CHECK(validate_instance(a).ok());
    CHECK(a.serve_cost == b.serve_cost);
    CHECK(a.open_cost == b.open_cost);
    CHECK(a.demand_prob == b.demand_prob);
    const int ell = cfg.ell_mode == LowerBoundMode::kPositive ? 3 : 0;
    for (int l : a.min_assigned) CHECK(l == ell);
  }
  auto cfg = base_config(1);
  cfg.setup_variability = SetupVariability::kNone;
  const auto flat = generate_instance(cfg);
  for (double f : flat.open_cost) CHECK(f == flat.open_cost[0]);
}

TEST_CASE("generator rejects bad configurations") {
  auto cfg = base_config(1);
  cfg.gamma = 3;
  CHECK_THROWS_AS(generate_instance(cfg), InputError);
  cfg = base_config(1);
  cfg.n_customers = 200;
  CHECK_THROWS_AS(generate_instance(cfg), InputError);
  cfg = base_config(1);
  cfg.n_sites = 0;
  CHECK_THROWS_AS(generate_instance(cfg), InputError);
  CHECK_THROWS_AS(parse_pattern("PT3"), InputError);
  CHECK(parse_pattern("pt2") == DemandPattern::kPT2);
}

TEST_CASE("TSPLIB parsing") {
  const auto pts = load_coords(FLPBD_TEST_DATA "/three_nodes.tsp");
  REQUIRE(pts.size() == 3);
  CHECK(euclidean_rounded(pts[0], pts[1]) == 5.0);
  CHECK(euclidean_rounded(pts[0], pts[2]) == 8.0);
  CHECK(euclidean_rounded(pts[1], pts[2]) == 5.0);

  CHECK_THROWS_AS(load_coords(FLPBD_TEST_DATA "/no_coords.tsp"), InputError);
  CHECK(load_coords(FLPBD_TEST_DATA "/berlin52_like.tsp").size() == 52);

  std::istringstream wrong_dim("DIMENSION: 4\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n");
  CHECK_THROWS_AS(parse_tsplib(wrong_dim), InputError);
  std::istringstream geo("DIMENSION: 1\nEDGE_WEIGHT_TYPE: GEO\nNODE_COORD_SECTION\n1 0 0\nEOF\n");
  CHECK_THROWS_AS(parse_tsplib(geo), InputError);
}
