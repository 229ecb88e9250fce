#include "flpbd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "flpbd/kernels.hpp"
#include "flpbd/random.hpp"

namespace flpbd {
namespace {

using nlohmann::json;

constexpr double kProbSumTol = 1e-12;
constexpr double kDeltaFloor = 0.1;

std::vector<int> demand_indices(std::span<const std::uint8_t> row) {
  std::vector<int> out;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<double> equal_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

void require_positive_count(std::size_t n_scenarios) {
  if (n_scenarios == 0) throw InputError("scenario count must be at least 1");
}

}  // namespace

ScenarioSet make_scenario_set(std::size_t n_customers, std::vector<double> prob,
                              std::vector<std::uint8_t> demand,
                              std::vector<std::vector<int>> call_order) {
  const std::size_t n_scen = prob.size();
  if (n_scen == 0) throw InputError("scenario set is empty");
  if (demand.size() != n_scen * n_customers) {
    throw InputError("demand matrix has " + std::to_string(demand.size()) +
                     " entries, expected " + std::to_string(n_scen * n_customers));
  }
  double total = 0.0;
  for (std::size_t w = 0; w < n_scen; ++w) {
    if (!std::isfinite(prob[w]) || prob[w] <= 0.0) {
      throw InputError("scenario " + std::to_string(w) + " has non-positive probability");
    }
    total += prob[w];
  }
  if (std::abs(total - 1.0) > kProbSumTol) {
    throw InputError("scenario probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (auto d : demand) {
    if (d > 1) throw InputError("demand entries must be 0 or 1");
  }
  if (!call_order.empty() && call_order.size() != n_scen) {
    throw InputError("call_order must have one entry per scenario");
  }

  ScenarioSet s;
  s.n_customers_ = n_customers;
  s.prob_ = std::move(prob);
  s.demand_ = std::move(demand);
  s.demand_list_.reserve(n_scen);
  for (std::size_t w = 0; w < n_scen; ++w) s.demand_list_.push_back(demand_indices(s.demand_row(w)));

  for (std::size_t w = 0; w < call_order.size(); ++w) {
    const auto& order = call_order[w];
    const auto& expected = s.demand_list_[w];
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != expected) {
      throw InputError("call_order of scenario " + std::to_string(w) +
                       " is not a permutation of its demand customers");
    }
  }
  s.call_order_ = std::move(call_order);

  s.empirical_prob_.assign(n_customers, 0.0);
  for (std::size_t w = 0; w < n_scen; ++w) {
    kernels::accumulate_flags(s.prob_[w], s.demand_row(w), s.empirical_prob_);
  }
  return s;
}

std::size_t demand_count(const ScenarioSet& s, std::size_t w) {
  if (w >= s.size()) {
    throw std::out_of_range("scenario index " + std::to_string(w) + " out of range");
  }
  return s.demand_customers(w).size();
}

double correlation_weight(double delta, double max_delta) {
  return 1.0 + std::cbrt(1.0 - 2.0 * delta / max_delta);
}

CorrelationSpec build_correlation_spec(const Instance& inst) {
  const std::size_t n = inst.n_customers;
  const std::size_t m = inst.n_sites;
  if (n < 2) throw InputError("correlated demands need at least two customers");

  // Customer-major copy of the cost matrix so each column is contiguous.
  std::vector<double> columns(n * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) columns[j * m + i] = inst.cost(i, j);
  }

  CorrelationSpec spec;
  spec.n_customers = n;
  spec.delta.assign(n * n, kDeltaFloor);
  for (std::size_t j = 0; j < n; ++j) {
    std::span<const double> cj(columns.data() + j * m, m);
    for (std::size_t k = j + 1; k < n; ++k) {
      std::span<const double> ck(columns.data() + k * m, m);
      const double d = std::max(kDeltaFloor, kernels::max_abs_diff(cj, ck));
      spec.delta[j * n + k] = d;
      spec.delta[k * n + j] = d;
    }
  }
  spec.max_delta = *std::max_element(spec.delta.begin(), spec.delta.end());
  if (spec.max_delta <= kDeltaFloor) {
    throw InputError("all customer pseudo-distances equal the floor; correlation weights vanish");
  }

  spec.weights.resize(n * n);
  spec.norm.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      spec.weights[j * n + k] = correlation_weight(spec.delta[j * n + k], spec.max_delta);
    }
    std::span<const double> row(spec.weights.data() + j * n, n);
    spec.norm[j] = std::sqrt(kernels::dot(row, row));
  }
  return spec;
}

ScenarioSet sample_independent(const Instance& inst, std::size_t n_scenarios,
                               std::uint64_t seed) {
  require_positive_count(n_scenarios);
  const std::size_t n = inst.n_customers;
  Rng rng(seed);
  std::vector<std::uint8_t> demand(n_scenarios * n, 0);
  std::vector<std::vector<int>> orders(n_scenarios);
  for (std::size_t w = 0; w < n_scenarios; ++w) {
    for (std::size_t j = 0; j < n; ++j) {
      demand[w * n + j] = rng.uniform() < inst.demand_prob[j] ? 1 : 0;
    }
    orders[w] = demand_indices({demand.data() + w * n, n});
    rng.shuffle(std::span<int>(orders[w]));
  }
  return make_scenario_set(n, equal_weights(n_scenarios), std::move(demand), std::move(orders));
}

ScenarioSet sample_correlated(const Instance& inst, std::size_t n_scenarios,
                              std::uint64_t seed) {
  return sample_correlated(inst, build_correlation_spec(inst), n_scenarios, seed);
}

ScenarioSet sample_correlated(const Instance& inst, const CorrelationSpec& spec,
                              std::size_t n_scenarios, std::uint64_t seed) {
  require_positive_count(n_scenarios);
  const std::size_t n = inst.n_customers;
  if (spec.n_customers != n) throw InputError("correlation spec does not match instance");
  Rng rng(seed);
  std::vector<std::uint8_t> demand(n_scenarios * n, 0);
  std::vector<std::vector<int>> orders(n_scenarios);
  std::vector<double> z(n);
  std::vector<double> y(n);
  for (std::size_t w = 0; w < n_scenarios; ++w) {
    for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal();
    kernels::mix_rows(spec.weights, z, spec.norm, y);
    for (std::size_t j = 0; j < n; ++j) {
      demand[w * n + j] = normal_cdf(y[j]) <= inst.demand_prob[j] ? 1 : 0;
    }
    orders[w] = demand_indices({demand.data() + w * n, n});
    rng.shuffle(std::span<int>(orders[w]));
  }
  return make_scenario_set(n, equal_weights(n_scenarios), std::move(demand), std::move(orders));
}

nlohmann::json scenarios_to_json(const ScenarioSet& s) {
  json doc;
  doc["prob"] = std::vector<double>(s.probs().begin(), s.probs().end());
  json rows = json::array();
  for (std::size_t w = 0; w < s.size(); ++w) {
    auto row = s.demand_row(w);
    rows.push_back(std::vector<int>(row.begin(), row.end()));
  }
  doc["demand"] = std::move(rows);
  if (s.has_call_orders()) {
    json orders = json::array();
    for (std::size_t w = 0; w < s.size(); ++w) {
      auto order = s.call_order(w);
      orders.push_back(std::vector<int>(order.begin(), order.end()));
    }
    doc["call_order"] = std::move(orders);
  }
  return doc;
}

ScenarioSet scenarios_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("prob") || !doc.contains("demand")) {
    throw InputError("scenario document needs 'prob' and 'demand'");
  }
  try {
    auto prob = doc.at("prob").get<std::vector<double>>();
    const auto& rows = doc.at("demand");
    if (!rows.is_array() || rows.size() != prob.size()) {
      throw InputError("'demand' must have one row per scenario");
    }
    const std::size_t n = rows.empty() ? 0 : rows[0].size();
    std::vector<std::uint8_t> demand;
    demand.reserve(prob.size() * n);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n) throw InputError("ragged demand matrix");
      for (const auto& v : row) {
        const int d = v.get<int>();
        if (d != 0 && d != 1) throw InputError("demand entries must be 0 or 1");
        demand.push_back(static_cast<std::uint8_t>(d));
      }
    }
    std::vector<std::vector<int>> orders;
    if (doc.contains("call_order")) orders = doc.at("call_order").get<std::vector<std::vector<int>>>();
    return make_scenario_set(n, std::move(prob), std::move(demand), std::move(orders));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed scenario document: ") + e.what());
  }
}

ScenarioSet load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return scenarios_from_json(doc);
}

void save_scenarios(const ScenarioSet& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << scenarios_to_json(s).dump() << '\n';
}

void require_compatible(const Instance& inst, const ScenarioSet& s) {
  if (s.n_customers() != inst.n_customers) {
    throw InputError("scenario set covers " + std::to_string(s.n_customers()) +
                     " customers, instance has " + std::to_string(inst.n_customers));
  }
}

}  // namespace flpbd
