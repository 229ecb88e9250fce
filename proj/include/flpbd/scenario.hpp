#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

#include "flpbd/instance.hpp"

namespace flpbd {

/// Finite set of demand scenarios. Demands are stored row-major by scenario.
/// Instances are built through make_scenario_set(), which enforces:
///  * probabilities positive and summing to 1 within 1e-12;
///  * demands in {0, 1};
///  * call_order[w] is a permutation of the demand customers of scenario w
///    (call orders may be absent altogether; OD-CO then refuses the set).
class ScenarioSet {
 public:
  ScenarioSet() = default;

  std::size_t size() const { return prob_.size(); }
  std::size_t n_customers() const { return n_customers_; }

  double prob(std::size_t w) const { return prob_[w]; }
  std::span<const double> probs() const { return prob_; }

  bool demand(std::size_t w, std::size_t j) const { return demand_[w * n_customers_ + j] != 0; }
  std::span<const std::uint8_t> demand_row(std::size_t w) const {
    return {demand_.data() + w * n_customers_, n_customers_};
  }

  bool has_call_orders() const { return !call_order_.empty(); }
  std::span<const int> call_order(std::size_t w) const { return call_order_.at(w); }

  /// Demand customers of scenario w in ascending index order.
  std::span<const int> demand_customers(std::size_t w) const { return demand_list_[w]; }

  /// p̂_j = sum_w prob_w * d_j^w.
  std::span<const double> empirical_prob() const { return empirical_prob_; }

  friend ScenarioSet make_scenario_set(std::size_t n_customers, std::vector<double> prob,
                                       std::vector<std::uint8_t> demand,
                                       std::vector<std::vector<int>> call_order);

 private:
  std::size_t n_customers_ = 0;
  std::vector<double> prob_;
  std::vector<std::uint8_t> demand_;
  std::vector<std::vector<int>> call_order_;
  std::vector<std::vector<int>> demand_list_;
  std::vector<double> empirical_prob_;
};

/// Validates and assembles a scenario set. `call_order` is either empty or
/// has one entry per scenario. Throws InputError on any violated invariant.
ScenarioSet make_scenario_set(std::size_t n_customers, std::vector<double> prob,
                              std::vector<std::uint8_t> demand,
                              std::vector<std::vector<int>> call_order);

/// D^w, the number of demand customers of scenario w. Throws std::out_of_range.
std::size_t demand_count(const ScenarioSet& s, std::size_t w);

/// Pseudo-distances between customers and the weights that mix independent
/// normals into spatially correlated ones.
struct CorrelationSpec {
  std::size_t n_customers = 0;
  std::vector<double> delta;    // row-major n x n, delta[j][k] = max(0.1, max_i |c_ij - c_ik|)
  double max_delta = 0.0;       // Delta
  std::vector<double> weights;  // row-major n x n, w(delta[j][k])
  std::vector<double> norm;     // sqrt(sum_k weights[j][k]^2)
};

/// w(delta) = 1 + cbrt(1 - 2 delta / Delta) with the real cube root.
double correlation_weight(double delta, double max_delta);

/// Throws InputError when the instance has fewer than two customers or when
/// every pseudo-distance equals the 0.1 floor (all weights vanish).
CorrelationSpec build_correlation_spec(const Instance& inst);

/// Independent Bernoulli(p_j) demands, equal scenario weights, uniformly
/// random call orders. Stream per scenario: n uniforms, then the shuffle.
ScenarioSet sample_independent(const Instance& inst, std::size_t n_scenarios,
                               std::uint64_t seed);

/// Correlated demands: Z ~ N(0, I), Y_j = sum_k w_jk Z_k / norm_j,
/// d_j = [Phi(Y_j) <= p_j]. Stream per scenario: n normals, then the shuffle.
ScenarioSet sample_correlated(const Instance& inst, std::size_t n_scenarios,
                              std::uint64_t seed);
ScenarioSet sample_correlated(const Instance& inst, const CorrelationSpec& spec,
                              std::size_t n_scenarios, std::uint64_t seed);

// JSON: {"prob": [...], "demand": [[0,1,...], ...], "call_order": [[...], ...]}.
nlohmann::json scenarios_to_json(const ScenarioSet& s);
ScenarioSet scenarios_from_json(const nlohmann::json& doc);
ScenarioSet load_scenarios(const std::filesystem::path& path);
void save_scenarios(const ScenarioSet& s, const std::filesystem::path& path);

/// Throws InputError unless the set covers exactly inst.n_customers customers.
void require_compatible(const Instance& inst, const ScenarioSet& s);

}  // namespace flpbd
