#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "flpbd/common.hpp"
#include "flpbd/instance.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd::milp {

enum class VarKind { kBinary, kContinuous };  // continuous means >= 0
enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double objective = 0.0;
};

struct Term {
  int column = 0;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// Solver-neutral minimization model: named columns in declaration order
/// and named linear rows.
class MilpModel {
 public:
  explicit MilpModel(std::string name = "flpbd") : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  /// Throws InputError on a duplicate name.
  int add_variable(std::string name, VarKind kind, double objective = 0.0);
  /// Merges repeated columns and drops zero coefficients. Throws InputError
  /// on a duplicate row name or an undeclared column.
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void add_objective(int column, double coef) { vars_.at(column).objective += coef; }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  std::size_t num_binaries() const;

  std::optional<int> find(const std::string& name) const;
  int column(const std::string& name) const;  // throws InputError if absent

  double objective_value(std::span<const double> values) const;
  /// Largest violation over rows, variable domains (binary / nonnegative).
  double max_violation(std::span<const double> values) const;

 private:
  std::string name_;
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
};

// Column names: y_i, x_i_j, th_i_w, z_w, s_i_j_w, lam_j_w, mu_j_w.
// Row names: asg_j, lnk_i_j, low_i, ovf_i_w, pen_w, cexp_i, cmax, sx_i_j,
// cap_i_w, out_i_w, ord_i_j_w, act_i_j_w, cov_j_w.
std::string y_name(std::size_t i);
std::string x_name(std::size_t i, std::size_t j);

/// Location and allocation binaries with the single-assignment, linking and
/// lower-bound rows (|I| + |I||J| columns, |J| + |I||J| + |I| rows).
MilpModel build_first_stage(const Instance& inst);

/// FO model. Service is charged through the empirical probabilities of the
/// scenario set. With cuts: one expected-outsourcing row per site and one
/// covering row for the scenario with the most demand customers (lowest
/// index on ties).
MilpModel build_fo(const Instance& inst, const ScenarioSet& scen, bool with_cuts);
/// CD-CO model; service terms carry the scenario probability.
MilpModel build_cdco(const Instance& inst, const ScenarioSet& scen);
/// CD-CO plus FIFO rows, one per (site, scenario, demand customer).
MilpModel build_odco(const Instance& inst, const ScenarioSet& scen);
MilpModel build_ro(const Instance& inst, const ScenarioSet& scen);
MilpModel build_model(Policy policy, const Instance& inst, const ScenarioSet& scen,
                      bool with_cuts = true);

/// Column values a first-stage solution and its recourse outcome induce
/// (y, x, theta, z, s, lambda, mu as applicable). Their objective value is
/// the evaluator's expected cost.
std::vector<double> induced_values(const MilpModel& model, Policy policy,
                                   const Instance& inst, const ScenarioSet& scen,
                                   const FirstStageSolution& sol);

/// Reads y_* and x_*_* columns back into a first-stage solution (values
/// above 0.5 count as 1). Throws InputError if a column is missing.
FirstStageSolution first_stage_from_values(const MilpModel& model, const Instance& inst,
                                           std::span<const double> values);

// Fixed-column MPS (names longer than 8 characters widen their field; any
// whitespace-tokenizing reader accepts the result) and CPLEX LP text.
void write_mps(const MilpModel& model, std::ostream& out);
void write_lp(const MilpModel& model, std::ostream& out);
MilpModel read_mps(std::istream& in);
MilpModel read_lp(std::istream& in);

void export_mps(const MilpModel& model, const std::filesystem::path& path);
void export_lp(const MilpModel& model, const std::filesystem::path& path);
MilpModel import_mps(const std::filesystem::path& path);
MilpModel import_lp(const std::filesystem::path& path);

}  // namespace flpbd::milp
