#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "flpbd/common.hpp"

namespace flpbd {

/// Deterministic FLPBD data. Sites are indexed i in [0, n_sites), customers j
/// in [0, n_customers). Service costs are stored row-major by site.
struct Instance {
  std::size_t n_sites = 0;
  std::size_t n_customers = 0;

  std::vector<double> open_cost;          // f_i
  std::vector<int> min_assigned;          // l_i
  std::vector<int> capacity;              // K_i
  std::vector<double> serve_cost;         // c_ij, size n_sites * n_customers
  std::vector<double> outsource_penalty;  // g_i (FO, CD-CO, OD-CO)
  double external_cost = 0.0;             // g (RO)
  std::vector<double> reassign_penalty;   // h_j (RO)
  std::vector<double> demand_prob;        // p_j

  // Optional external names; empty when absent.
  std::vector<std::string> site_labels;
  std::vector<std::string> customer_labels;

  double cost(std::size_t site, std::size_t customer) const {
    return serve_cost[site * n_customers + customer];
  }
  std::span<const double> cost_row(std::size_t site) const {
    return {serve_cost.data() + site * n_customers, n_customers};
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks value ranges and array lengths. Never throws.
ValidationReport validate_instance(const Instance& inst);

/// The a priori decision: open sites and a 0/1 assignment matrix (row-major by site).
class FirstStageSolution {
 public:
  FirstStageSolution() = default;
  FirstStageSolution(std::size_t n_sites, std::size_t n_customers);

  /// Builds y and x from a site index per customer; sites in `site_of` are opened.
  static FirstStageSolution from_assignment(std::size_t n_sites,
                                            std::span<const int> site_of);

  std::size_t n_sites() const { return n_sites_; }
  std::size_t n_customers() const { return n_customers_; }

  bool is_open(std::size_t i) const { return open_[i] != 0; }
  bool assigned(std::size_t i, std::size_t j) const {
    return assign_[i * n_customers_ + j] != 0;
  }
  void set_open(std::size_t i, bool value) { open_[i] = value ? 1 : 0; }
  void set_assigned(std::size_t i, std::size_t j, bool value) {
    assign_[i * n_customers_ + j] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> open() const { return open_; }
  std::size_t open_count() const;

  /// Site of customer j, or -1 if j is assigned to no site. When the matrix
  /// assigns j more than once the lowest site index is returned.
  int site_of(std::size_t j) const;
  std::vector<int> site_vector() const;

  friend bool operator==(const FirstStageSolution&, const FirstStageSolution&) = default;

 private:
  std::size_t n_sites_ = 0;
  std::size_t n_customers_ = 0;
  std::vector<std::uint8_t> open_;
  std::vector<std::uint8_t> assign_;
};

struct FeasibilityVerdict {
  bool feasible = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return feasible; }
};

/// Exact check of the single-assignment, linking and lower-bound rows.
/// Capacities never enter. Throws InputError on dimension mismatch.
FeasibilityVerdict check_first_stage_feasible(const Instance& inst,
                                              const FirstStageSolution& sol);

/// Throws InfeasibleSolutionError carrying the first violation.
void require_first_stage_feasible(const Instance& inst, const FirstStageSolution& sol);

double opening_cost(const Instance& inst, const FirstStageSolution& sol);

// JSON I/O. Instance files: {"sites", "customers", "f", "l", "K", "g_i", "h",
// "p", "g_ext", "c"} with c row-major. Loaders reject non-finite numbers.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

// Solution files: {"open": [0/1...], "assign": [site per customer]} or a full
// "x" matrix (array of rows, one per site).
nlohmann::json solution_to_json(const FirstStageSolution& sol);
FirstStageSolution solution_from_json(const nlohmann::json& doc, std::size_t n_sites,
                                      std::size_t n_customers);
FirstStageSolution load_solution(const std::filesystem::path& path, const Instance& inst);
void save_solution(const FirstStageSolution& sol, const std::filesystem::path& path);

}  // namespace flpbd
