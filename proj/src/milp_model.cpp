#include <algorithm>
#include <cmath>
#include <string>

#include "flpbd/milp.hpp"
#include "flpbd/recourse.hpp"

namespace flpbd::milp {
namespace {

std::string join(const char* prefix, std::initializer_list<std::size_t> idx) {
  std::string out(prefix);
  for (auto k : idx) {
    out += '_';
    out += std::to_string(k);
  }
  return out;
}

std::string s_name(std::size_t i, std::size_t j, std::size_t w) { return join("s", {i, j, w}); }
std::string th_name(std::size_t i, std::size_t w) { return join("th", {i, w}); }
std::string z_name(std::size_t w) { return join("z", {w}); }
std::string lam_name(std::size_t j, std::size_t w) { return join("lam", {j, w}); }
std::string mu_name(std::size_t j, std::size_t w) { return join("mu", {j, w}); }

// Column ids of the pieces shared by all four models.
struct Layout {
  std::size_t m = 0, n = 0, n_scen = 0;
  int y0 = 0, x0 = 0;
  int y(std::size_t i) const { return y0 + static_cast<int>(i); }
  int x(std::size_t i, std::size_t j) const { return x0 + static_cast<int>(i * n + j); }
};

Layout add_first_stage(MilpModel& model, const Instance& inst) {
  Layout lay;
  lay.m = inst.n_sites;
  lay.n = inst.n_customers;
  lay.y0 = static_cast<int>(model.num_variables());
  for (std::size_t i = 0; i < lay.m; ++i) {
    model.add_variable(y_name(i), VarKind::kBinary, inst.open_cost[i]);
  }
  lay.x0 = static_cast<int>(model.num_variables());
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) model.add_variable(x_name(i, j), VarKind::kBinary);
  }
  for (std::size_t j = 0; j < lay.n; ++j) {
    std::vector<Term> t;
    for (std::size_t i = 0; i < lay.m; ++i) t.push_back({lay.x(i, j), 1.0});
    model.add_constraint(join("asg", {j}), std::move(t), Sense::kEqual, 1.0);
  }
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) {
      model.add_constraint(join("lnk", {i, j}), {{lay.x(i, j), 1.0}, {lay.y(i), -1.0}},
                           Sense::kLessEqual, 0.0);
    }
  }
  for (std::size_t i = 0; i < lay.m; ++i) {
    std::vector<Term> t{{lay.y(i), static_cast<double>(inst.min_assigned[i])}};
    for (std::size_t j = 0; j < lay.n; ++j) t.push_back({lay.x(i, j), -1.0});
    model.add_constraint(join("low", {i}), std::move(t), Sense::kLessEqual, 0.0);
  }
  return lay;
}

// theta_i^w (i-major) followed by z^w; returns the first theta column.
int add_theta_z(MilpModel& model, const Layout& lay, const ScenarioSet& scen) {
  const int th0 = static_cast<int>(model.num_variables());
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      model.add_variable(th_name(i, w), VarKind::kContinuous);
    }
  }
  for (std::size_t w = 0; w < lay.n_scen; ++w) {
    model.add_variable(z_name(w), VarKind::kContinuous, scen.prob(w));
  }
  return th0;
}

void add_penalty_rows(MilpModel& model, const Instance& inst, const Layout& lay, int th0) {
  const int z0 = th0 + static_cast<int>(lay.m * lay.n_scen);
  for (std::size_t w = 0; w < lay.n_scen; ++w) {
    std::vector<Term> t{{z0 + static_cast<int>(w), 1.0}};
    for (std::size_t i = 0; i < lay.m; ++i) {
      t.push_back({th0 + static_cast<int>(i * lay.n_scen + w), -inst.outsource_penalty[i]});
    }
    model.add_constraint(join("pen", {w}), std::move(t), Sense::kGreaterEqual, 0.0);
  }
}

// s_i^j^w binaries, i-major then j then w, with pi_w-weighted costs.
int add_service_vars(MilpModel& model, const Instance& inst, const Layout& lay,
                     const ScenarioSet& scen) {
  const int s0 = static_cast<int>(model.num_variables());
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) {
      for (std::size_t w = 0; w < lay.n_scen; ++w) {
        model.add_variable(s_name(i, j, w), VarKind::kBinary, scen.prob(w) * inst.cost(i, j));
      }
    }
  }
  return s0;
}

int s_col(const Layout& lay, int s0, std::size_t i, std::size_t j, std::size_t w) {
  return s0 + static_cast<int>((i * lay.n + j) * lay.n_scen + w);
}

struct CoLayout {
  Layout lay;
  int s0 = 0;
  int th0 = 0;
};

CoLayout build_co(MilpModel& model, const Instance& inst, const ScenarioSet& scen) {
  require_compatible(inst, scen);
  CoLayout co;
  co.lay = add_first_stage(model, inst);
  auto& lay = co.lay;
  lay.n_scen = scen.size();
  co.s0 = add_service_vars(model, inst, lay, scen);
  co.th0 = add_theta_z(model, lay, scen);

  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) {
      std::vector<Term> t;
      double demand_scenarios = 0.0;
      for (std::size_t w = 0; w < lay.n_scen; ++w) {
        t.push_back({s_col(lay, co.s0, i, j, w), 1.0});
        demand_scenarios += scen.demand(w, j) ? 1.0 : 0.0;
      }
      t.push_back({lay.x(i, j), -demand_scenarios});
      model.add_constraint(join("sx", {i, j}), std::move(t), Sense::kLessEqual, 0.0);
    }
  }
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      std::vector<Term> t;
      for (int j : scen.demand_customers(w)) t.push_back({s_col(lay, co.s0, i, j, w), 1.0});
      model.add_constraint(join("cap", {i, w}), std::move(t), Sense::kLessEqual,
                           inst.capacity[i]);
    }
  }
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      std::vector<Term> t;
      for (int j : scen.demand_customers(w)) {
        t.push_back({s_col(lay, co.s0, i, j, w), 1.0});
        t.push_back({lay.x(i, j), -1.0});
      }
      t.push_back({co.th0 + static_cast<int>(i * lay.n_scen + w), 1.0});
      model.add_constraint(join("out", {i, w}), std::move(t), Sense::kGreaterEqual, 0.0);
    }
  }
  add_penalty_rows(model, inst, lay, co.th0);
  return co;
}

}  // namespace

int MilpModel::add_variable(std::string name, VarKind kind, double objective) {
  if (var_index_.count(name)) throw InputError("duplicate variable name " + name);
  const int id = static_cast<int>(vars_.size());
  var_index_.emplace(name, id);
  vars_.push_back({std::move(name), kind, objective});
  return id;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                              double rhs) {
  if (row_index_.count(name)) throw InputError("duplicate constraint name " + name);
  for (const auto& t : terms) {
    if (t.column < 0 || static_cast<std::size_t>(t.column) >= vars_.size()) {
      throw InputError("constraint " + name + " references an undeclared column");
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.column < b.column; });
  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().column == t.column) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  const int id = static_cast<int>(rows_.size());
  row_index_.emplace(name, id);
  rows_.push_back({std::move(name), std::move(merged), sense, rhs});
  return id;
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(
      vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::kBinary; }));
}

std::optional<int> MilpModel::find(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

int MilpModel::column(const std::string& name) const {
  auto id = find(name);
  if (!id) throw InputError("model has no column " + name);
  return *id;
}

double MilpModel::objective_value(std::span<const double> values) const {
  double total = 0.0;
  for (std::size_t k = 0; k < vars_.size(); ++k) total += vars_[k].objective * values[k];
  return total;
}

double MilpModel::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    const double v = values[k];
    worst = std::max(worst, -v);
    if (vars_[k].kind == VarKind::kBinary) {
      worst = std::max(worst, v - 1.0);
      worst = std::max(worst, std::min(std::abs(v), std::abs(v - 1.0)));
    }
  }
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * values[t.column];
    switch (row.sense) {
      case Sense::kLessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::kGreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::kEqual: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

std::string y_name(std::size_t i) { return join("y", {i}); }
std::string x_name(std::size_t i, std::size_t j) { return join("x", {i, j}); }

MilpModel build_first_stage(const Instance& inst) {
  MilpModel model("flpbd_first_stage");
  add_first_stage(model, inst);
  return model;
}

MilpModel build_fo(const Instance& inst, const ScenarioSet& scen, bool with_cuts) {
  require_compatible(inst, scen);
  MilpModel model("flpbd_fo");
  Layout lay = add_first_stage(model, inst);
  lay.n_scen = scen.size();
  const auto p_hat = scen.empirical_prob();
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) {
      model.add_objective(lay.x(i, j), p_hat[j] * inst.cost(i, j));
    }
  }
  const int th0 = add_theta_z(model, lay, scen);
  auto th = [&](std::size_t i, std::size_t w) { return th0 + static_cast<int>(i * lay.n_scen + w); };

  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      std::vector<Term> t{{th(i, w), 1.0}, {lay.y(i), static_cast<double>(inst.capacity[i])}};
      for (int j : scen.demand_customers(w)) t.push_back({lay.x(i, j), -1.0});
      model.add_constraint(join("ovf", {i, w}), std::move(t), Sense::kGreaterEqual, 0.0);
    }
  }
  add_penalty_rows(model, inst, lay, th0);

  if (with_cuts) {
    for (std::size_t i = 0; i < lay.m; ++i) {
      std::vector<Term> t;
      for (std::size_t w = 0; w < lay.n_scen; ++w) t.push_back({th(i, w), scen.prob(w)});
      for (std::size_t j = 0; j < lay.n; ++j) t.push_back({lay.x(i, j), -p_hat[j]});
      t.push_back({lay.y(i), static_cast<double>(inst.capacity[i])});
      model.add_constraint(join("cexp", {i}), std::move(t), Sense::kGreaterEqual, 0.0);
    }
    std::size_t busiest = 0;
    for (std::size_t w = 1; w < lay.n_scen; ++w) {
      if (demand_count(scen, w) > demand_count(scen, busiest)) busiest = w;
    }
    std::vector<Term> t;
    for (std::size_t i = 0; i < lay.m; ++i) {
      t.push_back({lay.y(i), static_cast<double>(inst.capacity[i])});
      t.push_back({th(i, busiest), 1.0});
    }
    model.add_constraint("cmax", std::move(t), Sense::kGreaterEqual,
                         static_cast<double>(demand_count(scen, busiest)));
  }
  return model;
}

MilpModel build_cdco(const Instance& inst, const ScenarioSet& scen) {
  MilpModel model("flpbd_cdco");
  build_co(model, inst, scen);
  return model;
}

MilpModel build_odco(const Instance& inst, const ScenarioSet& scen) {
  if (!scen.has_call_orders()) throw InputError("OD-CO model needs call orders");
  MilpModel model("flpbd_odco");
  const CoLayout co = build_co(model, inst, scen);
  const auto& lay = co.lay;
  for (std::size_t i = 0; i < lay.m; ++i) {
    const double k = inst.capacity[i];
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      const auto order = scen.call_order(w);
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto j = static_cast<std::size_t>(order[pos]);
        std::vector<Term> t{{lay.x(i, j), k}, {s_col(lay, co.s0, i, j, w), -k}};
        for (std::size_t before = 0; before < pos; ++before) {
          t.push_back({s_col(lay, co.s0, i, order[before], w), -1.0});
        }
        model.add_constraint(join("ord", {i, j, w}), std::move(t), Sense::kLessEqual, 0.0);
      }
    }
  }
  return model;
}

MilpModel build_ro(const Instance& inst, const ScenarioSet& scen) {
  require_compatible(inst, scen);
  MilpModel model("flpbd_ro");
  Layout lay = add_first_stage(model, inst);
  lay.n_scen = scen.size();
  const int s0 = add_service_vars(model, inst, lay, scen);
  const int lam0 = static_cast<int>(model.num_variables());
  for (std::size_t j = 0; j < lay.n; ++j) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      model.add_variable(lam_name(j, w), VarKind::kBinary, scen.prob(w) * inst.reassign_penalty[j]);
    }
  }
  const int mu0 = static_cast<int>(model.num_variables());
  for (std::size_t j = 0; j < lay.n; ++j) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      model.add_variable(mu_name(j, w), VarKind::kBinary, scen.prob(w) * inst.external_cost);
    }
  }
  auto lam = [&](std::size_t j, std::size_t w) { return lam0 + static_cast<int>(j * lay.n_scen + w); };
  auto mu = [&](std::size_t j, std::size_t w) { return mu0 + static_cast<int>(j * lay.n_scen + w); };

  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      std::vector<Term> t;
      for (std::size_t j = 0; j < lay.n; ++j) t.push_back({s_col(lay, s0, i, j, w), 1.0});
      t.push_back({lay.y(i), -static_cast<double>(inst.capacity[i])});
      model.add_constraint(join("cap", {i, w}), std::move(t), Sense::kLessEqual, 0.0);
    }
  }
  for (std::size_t i = 0; i < lay.m; ++i) {
    for (std::size_t j = 0; j < lay.n; ++j) {
      for (std::size_t w = 0; w < lay.n_scen; ++w) {
        const double d = scen.demand(w, j) ? 1.0 : 0.0;
        model.add_constraint(join("act", {i, j, w}),
                             {{s_col(lay, s0, i, j, w), 1.0}, {lam(j, w), -d}, {lay.x(i, j), -d}},
                             Sense::kLessEqual, 0.0);
      }
    }
  }
  for (std::size_t j = 0; j < lay.n; ++j) {
    for (std::size_t w = 0; w < lay.n_scen; ++w) {
      std::vector<Term> t;
      for (std::size_t i = 0; i < lay.m; ++i) t.push_back({s_col(lay, s0, i, j, w), 1.0});
      t.push_back({mu(j, w), 1.0});
      model.add_constraint(join("cov", {j, w}), std::move(t), Sense::kGreaterEqual,
                           scen.demand(w, j) ? 1.0 : 0.0);
    }
  }
  return model;
}

MilpModel build_model(Policy policy, const Instance& inst, const ScenarioSet& scen,
                      bool with_cuts) {
  switch (policy) {
    case Policy::kFacilityOutsourcing: return build_fo(inst, scen, with_cuts);
    case Policy::kCostDrivenOutsourcing: return build_cdco(inst, scen);
    case Policy::kOrderDrivenOutsourcing: return build_odco(inst, scen);
    case Policy::kReassignmentOutsourcing: return build_ro(inst, scen);
  }
  throw InputError("unknown policy");
}

std::vector<double> induced_values(const MilpModel& model, Policy policy,
                                   const Instance& inst, const ScenarioSet& scen,
                                   const FirstStageSolution& sol) {
  const auto ev = evaluate(policy, inst, scen, sol);
  std::vector<double> v(model.num_variables(), 0.0);
  auto set = [&](const std::string& name, double value) {
    if (auto id = model.find(name)) v[*id] = value;
  };
  const std::size_t m = inst.n_sites;
  const std::size_t n = inst.n_customers;
  for (std::size_t i = 0; i < m; ++i) {
    set(y_name(i), sol.is_open(i) ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) set(x_name(i, j), sol.assigned(i, j) ? 1.0 : 0.0);
  }
  for (std::size_t w = 0; w < scen.size(); ++w) {
    const auto& out = ev.per_scenario[w];
    if (policy != Policy::kReassignmentOutsourcing) {
      for (std::size_t i = 0; i < m; ++i) set(th_name(i, w), out.n_outsourced_at[i]);
      set(z_name(w), out.penalty_cost);
    }
    if (policy == Policy::kFacilityOutsourcing) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const int served = out.served[j];
      if (served >= 0) set(s_name(static_cast<std::size_t>(served), j, w), 1.0);
      if (policy == Policy::kReassignmentOutsourcing && served != kNoDemand) {
        set(lam_name(j, w), served >= 0 && !sol.assigned(served, j) ? 1.0 : 0.0);
        set(mu_name(j, w), served == kOutsourced ? 1.0 : 0.0);
      }
    }
  }
  return v;
}

FirstStageSolution first_stage_from_values(const MilpModel& model, const Instance& inst,
                                           std::span<const double> values) {
  FirstStageSolution sol(inst.n_sites, inst.n_customers);
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    sol.set_open(i, values[model.column(y_name(i))] > 0.5);
    for (std::size_t j = 0; j < inst.n_customers; ++j) {
      sol.set_assigned(i, j, values[model.column(x_name(i, j))] > 0.5);
    }
  }
  return sol;
}

}  // namespace flpbd::milp
