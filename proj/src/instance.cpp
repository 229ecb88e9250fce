#include "flpbd/instance.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace flpbd {
namespace {

using nlohmann::json;

template <typename T>
void check_length(std::vector<std::string>& out, const char* name, const std::vector<T>& v,
                  std::size_t expected) {
  if (v.size() != expected) {
    std::ostringstream os;
    os << "length mismatch: " << name << " has " << v.size() << " entries, expected "
       << expected;
    out.push_back(os.str());
  }
}

template <typename T>
void check_nonnegative(std::vector<std::string>& out, const char* name,
                       const std::vector<T>& v) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(static_cast<double>(v[k])) || v[k] < 0) {
      std::ostringstream os;
      os << "negative or non-finite value: " << name << "[" << k << "] = " << v[k];
      out.push_back(os.str());
    }
  }
}

double finite_number(const json& value, const std::string& what) {
  if (!value.is_number()) throw InputError(what + ": expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw InputError(what + ": non-finite number");
  return x;
}

std::vector<double> number_array(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(finite_number(arr[k], std::string(key) + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<int> integer_array(const json& doc, const char* key) {
  std::vector<int> out;
  for (double x : number_array(doc, key)) {
    if (x != std::floor(x) || std::abs(x) > 1e9) {
      throw InputError(std::string("field '") + key + "' must hold integers");
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::size_t count_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  const double x = finite_number(doc.at(key), key);
  if (x < 0 || x != std::floor(x)) throw InputError(std::string(key) + " must be a count");
  return static_cast<std::size_t>(x);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  auto& v = report.violations;
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;
  if (m == 0) v.push_back("instance has no sites");
  if (n == 0) v.push_back("instance has no customers");

  check_length(v, "f", inst.open_cost, m);
  check_length(v, "l", inst.min_assigned, m);
  check_length(v, "K", inst.capacity, m);
  check_length(v, "g_i", inst.outsource_penalty, m);
  check_length(v, "c", inst.serve_cost, m * n);
  check_length(v, "h", inst.reassign_penalty, n);
  check_length(v, "p", inst.demand_prob, n);
  if (!inst.site_labels.empty()) check_length(v, "site_labels", inst.site_labels, m);
  if (!inst.customer_labels.empty()) {
    check_length(v, "customer_labels", inst.customer_labels, n);
  }

  check_nonnegative(v, "f", inst.open_cost);
  check_nonnegative(v, "l", inst.min_assigned);
  check_nonnegative(v, "c", inst.serve_cost);
  check_nonnegative(v, "g_i", inst.outsource_penalty);
  check_nonnegative(v, "h", inst.reassign_penalty);
  if (!std::isfinite(inst.external_cost) || inst.external_cost < 0) {
    v.push_back("negative or non-finite value: g_ext");
  }
  for (std::size_t i = 0; i < inst.capacity.size(); ++i) {
    if (inst.capacity[i] < 1) {
      v.push_back("capacity below 1: K[" + std::to_string(i) + "] = " +
                  std::to_string(inst.capacity[i]));
    }
  }
  for (std::size_t j = 0; j < inst.demand_prob.size(); ++j) {
    const double p = inst.demand_prob[j];
    if (!(p >= 0.0 && p <= 1.0)) {
      std::ostringstream os;
      os << "probability out of range: p[" << j << "] = " << p;
      v.push_back(os.str());
    }
  }
  const long long total_lower =
      std::accumulate(inst.min_assigned.begin(), inst.min_assigned.end(), 0LL);
  if (total_lower > static_cast<long long>(n)) {
    v.push_back("assignment lower bounds exceed customer count: sum l = " +
                std::to_string(total_lower) + " > n = " + std::to_string(n));
  }
  return report;
}

FirstStageSolution::FirstStageSolution(std::size_t n_sites, std::size_t n_customers)
    : n_sites_(n_sites),
      n_customers_(n_customers),
      open_(n_sites, 0),
      assign_(n_sites * n_customers, 0) {}

FirstStageSolution FirstStageSolution::from_assignment(std::size_t n_sites,
                                                       std::span<const int> site_of) {
  FirstStageSolution sol(n_sites, site_of.size());
  for (std::size_t j = 0; j < site_of.size(); ++j) {
    const int i = site_of[j];
    if (i < 0 || static_cast<std::size_t>(i) >= n_sites) {
      throw InputError("assignment of customer " + std::to_string(j) + " out of range");
    }
    sol.set_open(static_cast<std::size_t>(i), true);
    sol.set_assigned(static_cast<std::size_t>(i), j, true);
  }
  return sol;
}

std::size_t FirstStageSolution::open_count() const {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), std::uint8_t{1}));
}

int FirstStageSolution::site_of(std::size_t j) const {
  for (std::size_t i = 0; i < n_sites_; ++i) {
    if (assigned(i, j)) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> FirstStageSolution::site_vector() const {
  std::vector<int> out(n_customers_);
  for (std::size_t j = 0; j < n_customers_; ++j) out[j] = site_of(j);
  return out;
}

FeasibilityVerdict check_first_stage_feasible(const Instance& inst,
                                              const FirstStageSolution& sol) {
  if (sol.n_sites() != inst.n_sites || sol.n_customers() != inst.n_customers) {
    throw InputError("solution dimensions " + std::to_string(sol.n_sites()) + "x" +
                     std::to_string(sol.n_customers()) + " do not match instance " +
                     std::to_string(inst.n_sites) + "x" + std::to_string(inst.n_customers));
  }
  FeasibilityVerdict verdict;
  auto fail = [&](std::string msg) {
    verdict.feasible = false;
    verdict.violations.push_back(std::move(msg));
  };
  for (std::size_t j = 0; j < inst.n_customers; ++j) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < inst.n_sites; ++i) count += sol.assigned(i, j) ? 1 : 0;
    if (count != 1) {
      fail("customer " + std::to_string(j) + " assigned " + std::to_string(count) +
           " times (single-assignment row)");
    }
  }
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    std::size_t load = 0;
    for (std::size_t j = 0; j < inst.n_customers; ++j) {
      if (!sol.assigned(i, j)) continue;
      ++load;
      if (!sol.is_open(i)) {
        fail("customer " + std::to_string(j) + " assigned to closed site " +
             std::to_string(i) + " (linking row)");
      }
    }
    if (sol.is_open(i) && load < static_cast<std::size_t>(inst.min_assigned[i])) {
      fail("open site " + std::to_string(i) + " has " + std::to_string(load) +
           " customers, lower bound " + std::to_string(inst.min_assigned[i]));
    }
  }
  return verdict;
}

void require_first_stage_feasible(const Instance& inst, const FirstStageSolution& sol) {
  auto verdict = check_first_stage_feasible(inst, sol);
  if (!verdict) throw InfeasibleSolutionError(verdict.violations.front());
}

double opening_cost(const Instance& inst, const FirstStageSolution& sol) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    if (sol.is_open(i)) total += inst.open_cost[i];
  }
  return total;
}

nlohmann::json instance_to_json(const Instance& inst) {
  json doc;
  doc["sites"] = inst.n_sites;
  doc["customers"] = inst.n_customers;
  doc["f"] = inst.open_cost;
  doc["l"] = inst.min_assigned;
  doc["K"] = inst.capacity;
  doc["g_i"] = inst.outsource_penalty;
  doc["h"] = inst.reassign_penalty;
  doc["p"] = inst.demand_prob;
  doc["g_ext"] = inst.external_cost;
  doc["c"] = inst.serve_cost;
  if (!inst.site_labels.empty()) doc["site_labels"] = inst.site_labels;
  if (!inst.customer_labels.empty()) doc["customer_labels"] = inst.customer_labels;
  return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");
  Instance inst;
  inst.n_sites = count_field(doc, "sites");
  inst.n_customers = count_field(doc, "customers");
  inst.open_cost = number_array(doc, "f");
  inst.min_assigned = integer_array(doc, "l");
  inst.capacity = integer_array(doc, "K");
  inst.outsource_penalty = number_array(doc, "g_i");
  inst.reassign_penalty = number_array(doc, "h");
  inst.demand_prob = number_array(doc, "p");
  if (!doc.contains("g_ext")) throw InputError("missing field 'g_ext'");
  inst.external_cost = finite_number(doc.at("g_ext"), "g_ext");
  inst.serve_cost = number_array(doc, "c");
  if (doc.contains("site_labels")) {
    inst.site_labels = doc.at("site_labels").get<std::vector<std::string>>();
  }
  if (doc.contains("customer_labels")) {
    inst.customer_labels = doc.at("customer_labels").get<std::vector<std::string>>();
  }
  auto report = validate_instance(inst);
  if (!report.ok()) throw InputError("invalid instance: " + report.violations.front());
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  write_json_file(instance_to_json(inst), path);
}

nlohmann::json solution_to_json(const FirstStageSolution& sol) {
  json doc;
  std::vector<int> open(sol.open().begin(), sol.open().end());
  doc["open"] = open;
  doc["assign"] = sol.site_vector();
  return doc;
}

FirstStageSolution solution_from_json(const nlohmann::json& doc, std::size_t n_sites,
                                      std::size_t n_customers) {
  if (!doc.is_object()) throw InputError("solution document must be a JSON object");
  FirstStageSolution sol(n_sites, n_customers);
  if (doc.contains("assign")) {
    const auto& arr = doc.at("assign");
    if (!arr.is_array() || arr.size() != n_customers) {
      throw InputError("solution 'assign' must list one site per customer");
    }
    for (std::size_t j = 0; j < n_customers; ++j) {
      const int i = arr[j].get<int>();
      if (i < 0 || static_cast<std::size_t>(i) >= n_sites) {
        throw InputError("solution assigns customer " + std::to_string(j) +
                         " to unknown site " + std::to_string(i));
      }
      sol.set_assigned(static_cast<std::size_t>(i), j, true);
    }
  } else if (doc.contains("x")) {
    const auto& rows = doc.at("x");
    if (!rows.is_array() || rows.size() != n_sites) {
      throw InputError("solution 'x' must have one row per site");
    }
    for (std::size_t i = 0; i < n_sites; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n_customers) {
        throw InputError("solution 'x' row " + std::to_string(i) + " has wrong length");
      }
      for (std::size_t j = 0; j < n_customers; ++j) {
        sol.set_assigned(i, j, rows[i][j].get<int>() != 0);
      }
    }
  } else {
    throw InputError("solution needs 'assign' or 'x'");
  }
  if (doc.contains("open")) {
    const auto& arr = doc.at("open");
    if (!arr.is_array() || arr.size() != n_sites) {
      throw InputError("solution 'open' must have one entry per site");
    }
    for (std::size_t i = 0; i < n_sites; ++i) sol.set_open(i, arr[i].get<int>() != 0);
  } else {
    for (std::size_t i = 0; i < n_sites; ++i) {
      for (std::size_t j = 0; j < n_customers; ++j) {
        if (sol.assigned(i, j)) sol.set_open(i, true);
      }
    }
  }
  return sol;
}

FirstStageSolution load_solution(const std::filesystem::path& path, const Instance& inst) {
  return solution_from_json(read_json_file(path), inst.n_sites, inst.n_customers);
}

void save_solution(const FirstStageSolution& sol, const std::filesystem::path& path) {
  write_json_file(solution_to_json(sol), path);
}

}  // namespace flpbd
