#include "flpbd/mip_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flpbd::milp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr double kIntTol = 1e-6;
constexpr int kRefactorEvery = 80;
constexpr int kMaxIterations = 200000;

// Constraint matrix of one block in equality form: structural columns, then
// one slack per row, then artificials.
struct LpData {
  int m = 0;
  int n = 0;
  int n_struct = 0;
  std::vector<double> a;  // m x n
  std::vector<double> b;
  std::vector<double> cost;
  std::vector<char> binary;  // per structural column
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpState {
  std::vector<double> t;  // B^-1 A, m x n
  std::vector<double> d;  // reduced costs
  std::vector<double> lb, ub, x;
  std::vector<double> cost;  // cost vector the reduced costs refer to
  std::vector<int> basis;
  std::vector<int> row_of;
  int since_refactor = 0;
};

class Simplex {
 public:
  explicit Simplex(const LpData& data) : lp_(data) {}

  double& t(LpState& s, int r, int j) const { return s.t[static_cast<std::size_t>(r) * lp_.n + j]; }
  double t(const LpState& s, int r, int j) const {
    return s.t[static_cast<std::size_t>(r) * lp_.n + j];
  }

  void pivot(LpState& s, int r, int q) const {
    const int n = lp_.n;
    double* row = &s.t[static_cast<std::size_t>(r) * n];
    const double piv = row[q];
    nz_.clear();
    for (int j = 0; j < n; ++j) {
      if (row[j] != 0.0) {
        row[j] /= piv;
        nz_.push_back(j);
      }
    }
    row[q] = 1.0;
    for (int i = 0; i < lp_.m; ++i) {
      if (i == r) continue;
      double* other = &s.t[static_cast<std::size_t>(i) * n];
      const double f = other[q];
      if (f == 0.0) continue;
      for (int j : nz_) other[j] -= f * row[j];
      other[q] = 0.0;
    }
    const double fd = s.d[q];
    if (fd != 0.0) {
      for (int j : nz_) s.d[j] -= fd * row[j];
      s.d[q] = 0.0;
    }
    s.row_of[s.basis[r]] = -1;
    s.basis[r] = q;
    s.row_of[q] = r;
    ++s.since_refactor;
  }

  void compute_reduced_costs(LpState& s) const {
    s.d = s.cost;
    for (int r = 0; r < lp_.m; ++r) {
      const double cb = s.cost[s.basis[r]];
      if (cb == 0.0) continue;
      for (int j = 0; j < lp_.n; ++j) s.d[j] -= cb * t(s, r, j);
    }
    for (int r = 0; r < lp_.m; ++r) s.d[s.basis[r]] = 0.0;
  }

  // Rebuilds B^-1 A and the basic values from the original matrix.
  void refactor(LpState& s) const {
    const int m = lp_.m;
    const int n = lp_.n;
    std::vector<double> binv(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> bm(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < m; ++k) bm[r * m + k] = lp_.a[static_cast<std::size_t>(r) * n + s.basis[k]];
      binv[r * m + r] = 1.0;
    }
    for (int c = 0; c < m; ++c) {
      int best = c;
      for (int r = c + 1; r < m; ++r) {
        if (std::abs(bm[r * m + c]) > std::abs(bm[best * m + c])) best = r;
      }
      if (std::abs(bm[best * m + c]) < 1e-12) throw std::runtime_error("singular basis");
      if (best != c) {
        for (int k = 0; k < m; ++k) {
          std::swap(bm[c * m + k], bm[best * m + k]);
          std::swap(binv[c * m + k], binv[best * m + k]);
        }
      }
      const double piv = bm[c * m + c];
      for (int k = 0; k < m; ++k) {
        bm[c * m + k] /= piv;
        binv[c * m + k] /= piv;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = bm[r * m + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          bm[r * m + k] -= f * bm[c * m + k];
          binv[r * m + k] -= f * binv[c * m + k];
        }
      }
    }
    std::fill(s.t.begin(), s.t.end(), 0.0);
    for (int r = 0; r < m; ++r) {
      double* out = &s.t[static_cast<std::size_t>(r) * n];
      for (int k = 0; k < m; ++k) {
        const double f = binv[r * m + k];
        if (f == 0.0) continue;
        const double* in = &lp_.a[static_cast<std::size_t>(k) * n];
        for (int j = 0; j < n; ++j) out[j] += f * in[j];
      }
    }
    std::vector<double> rhs(lp_.b);
    for (int j = 0; j < n; ++j) {
      if (s.row_of[j] >= 0 || s.x[j] == 0.0) continue;
      for (int r = 0; r < m; ++r) rhs[r] -= lp_.a[static_cast<std::size_t>(r) * n + j] * s.x[j];
    }
    for (int r = 0; r < m; ++r) {
      double v = 0.0;
      for (int k = 0; k < m; ++k) v += binv[r * m + k] * rhs[k];
      s.x[s.basis[r]] = v;
    }
    compute_reduced_costs(s);
    s.since_refactor = 0;
  }

  LpStatus primal(LpState& s) const {
    int degenerate = 0;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      const bool bland = degenerate > 50;
      int q = -1;
      double best = 0.0;
      int dir = 0;
      for (int j = 0; j < lp_.n; ++j) {
        if (s.row_of[j] >= 0 || s.lb[j] == s.ub[j]) continue;
        int dj = 0;
        if (s.d[j] < -kCostTol && s.x[j] < s.ub[j]) dj = 1;
        else if (s.d[j] > kCostTol && s.x[j] > s.lb[j]) dj = -1;
        if (dj == 0) continue;
        if (bland) {
          q = j;
          dir = dj;
          break;
        }
        if (std::abs(s.d[j]) > best) {
          best = std::abs(s.d[j]);
          q = j;
          dir = dj;
        }
      }
      if (q < 0) return LpStatus::kOptimal;

      double theta = s.ub[q] - s.lb[q];
      int leave = -1;
      double leave_pivot = 0.0;
      bool leave_to_lower = false;
      for (int r = 0; r < lp_.m; ++r) {
        const double a = t(s, r, q) * dir;
        if (std::abs(a) <= kPivotTol) continue;
        const int col = s.basis[r];
        double lim;
        if (a > 0) {
          if (s.lb[col] == -kInf) continue;
          lim = (s.x[col] - s.lb[col]) / a;
        } else {
          if (s.ub[col] == kInf) continue;
          lim = (s.ub[col] - s.x[col]) / -a;
        }
        lim = std::max(lim, 0.0);
        if (lim < theta - 1e-12 || (lim <= theta + 1e-12 && leave >= 0 && std::abs(a) > leave_pivot)) {
          theta = lim;
          leave = r;
          leave_pivot = std::abs(a);
          leave_to_lower = a > 0;
        }
      }
      if (theta == kInf) return LpStatus::kUnbounded;
      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
      if (theta > 0) {
        for (int r = 0; r < lp_.m; ++r) {
          const double a = t(s, r, q);
          if (a != 0.0) s.x[s.basis[r]] -= a * dir * theta;
        }
      }
      if (leave < 0) {
        s.x[q] = dir > 0 ? s.ub[q] : s.lb[q];
        continue;
      }
      s.x[q] += dir * theta;
      const int col = s.basis[leave];
      s.x[col] = leave_to_lower ? s.lb[col] : s.ub[col];
      pivot(s, leave, q);
      if (s.since_refactor >= kRefactorEvery) refactor(s);
    }
    throw std::runtime_error("simplex iteration limit");
  }

  LpStatus dual(LpState& s) const {
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      int r = -1;
      double worst = kFeasTol;
      for (int i = 0; i < lp_.m; ++i) {
        const int col = s.basis[i];
        const double v = s.x[col];
        const double viol = std::max(s.lb[col] - v, v - s.ub[col]);
        if (viol > worst * std::max(1.0, std::abs(v))) {
          worst = viol;
          r = i;
        }
      }
      if (r < 0) return LpStatus::kOptimal;
      const int leaving = s.basis[r];
      const bool increase = s.x[leaving] < s.lb[leaving];
      const double target = increase ? s.lb[leaving] : s.ub[leaving];

      int q = -1;
      double best_ratio = kInf;
      double best_pivot = 0.0;
      for (int j = 0; j < lp_.n; ++j) {
        if (s.row_of[j] >= 0 || s.lb[j] == s.ub[j]) continue;
        const double a = t(s, r, j);
        if (std::abs(a) <= kPivotTol) continue;
        const bool at_lower = s.x[j] <= s.lb[j];
        // x_B moves by -a per unit of x_j.
        const bool ok = increase ? (at_lower ? a < 0 : a > 0) : (at_lower ? a > 0 : a < 0);
        if (!ok) continue;
        const double ratio = std::abs(s.d[j]) / std::abs(a);
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && std::abs(a) > best_pivot)) {
          best_ratio = ratio;
          best_pivot = std::abs(a);
          q = j;
        }
      }
      if (q < 0) return LpStatus::kInfeasible;
      const double delta = (s.x[leaving] - target) / t(s, r, q);
      for (int i = 0; i < lp_.m; ++i) {
        const double a = t(s, i, q);
        if (a != 0.0) s.x[s.basis[i]] -= a * delta;
      }
      s.x[q] += delta;
      s.x[leaving] = target;
      pivot(s, r, q);
      if (s.since_refactor >= kRefactorEvery) refactor(s);
    }
    throw std::runtime_error("dual simplex iteration limit");
  }

  double objective(const LpState& s) const {
    double v = 0.0;
    for (int j = 0; j < lp_.n_struct; ++j) v += lp_.cost[j] * s.x[j];
    return v;
  }

  const LpData& data() const { return lp_; }

 private:
  const LpData& lp_;
  mutable std::vector<int> nz_;
};

// Row in presolve.
struct PRow {
  std::vector<Term> terms;
  Sense sense;
  double rhs;
  bool active = true;
};

struct Block {
  std::vector<int> cols;  // original column ids
  std::vector<int> rows;  // presolve row ids
};

struct BlockResult {
  MipStatus status = MipStatus::kInfeasible;
  double objective = kInf;
  double bound = -kInf;
  std::vector<double> values;  // per block column
  std::int64_t nodes = 0;
};

class Presolve {
 public:
  Presolve(const MilpModel& model, const MipOptions& opt) : model_(model) {
    const auto& vars = model.variables();
    const std::size_t n = vars.size();
    lb_.assign(n, 0.0);
    ub_.resize(n);
    for (std::size_t j = 0; j < n; ++j) ub_[j] = vars[j].kind == VarKind::kBinary ? 1.0 : kInf;
    for (auto [col, v] : opt.fixed) {
      if (col < 0 || static_cast<std::size_t>(col) >= n) throw InputError("fixing of unknown column");
      if (v < lb_[col] - kFeasTol || v > ub_[col] + kFeasTol) {
        infeasible_ = true;
      }
      lb_[col] = ub_[col] = v;
    }
    for (const auto& c : model.constraints()) rows_.push_back({c.terms, c.sense, c.rhs});
    col_rows_.resize(n);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (const auto& t : rows_[r].terms) col_rows_[t.column].push_back(static_cast<int>(r));
    }
  }

  bool run() {
    if (infeasible_) return false;
    for (int round = 0; round < 100; ++round) {
      bool changed = false;
      for (auto& row : rows_) {
        if (!row.active) continue;
        if (!process_row(row, changed)) return false;
      }
      changed |= fix_dominated();
      if (!changed) break;
    }
    return true;
  }

  std::vector<Block> blocks() const {
    const int n = static_cast<int>(lb_.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& row : rows_) {
      if (!row.active) continue;
      int first = -1;
      for (const auto& t : row.terms) {
        if (fixed(t.column)) continue;
        if (first < 0) first = t.column;
        else parent[find(t.column)] = find(first);
      }
    }
    std::vector<int> block_of(n, -1);
    std::vector<Block> out;
    for (int j = 0; j < n; ++j) {
      if (fixed(j)) continue;
      const int root = find(j);
      if (block_of[root] < 0) {
        block_of[root] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[block_of[root]].cols.push_back(j);
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!rows_[r].active) continue;
      for (const auto& t : rows_[r].terms) {
        if (!fixed(t.column)) {
          out[block_of[find(t.column)]].rows.push_back(static_cast<int>(r));
          break;
        }
      }
    }
    return out;
  }

  bool fixed(int j) const { return lb_[j] == ub_[j]; }
  double lb(int j) const { return lb_[j]; }
  double ub(int j) const { return ub_[j]; }
  const PRow& row(int r) const { return rows_[r]; }

 private:
  bool process_row(PRow& row, bool& changed) {
    double min_act = 0.0, max_act = 0.0;
    int min_inf = 0, max_inf = 0;
    for (const auto& t : row.terms) {
      const double lo = t.coef > 0 ? lb_[t.column] : ub_[t.column];
      const double hi = t.coef > 0 ? ub_[t.column] : lb_[t.column];
      if (std::isinf(lo)) ++min_inf; else min_act += t.coef * lo;
      if (std::isinf(hi)) ++max_inf; else max_act += t.coef * hi;
    }
    const double tol = kFeasTol * std::max(1.0, std::abs(row.rhs));
    const bool le = row.sense != Sense::kGreaterEqual;
    const bool ge = row.sense != Sense::kLessEqual;
    if (le && min_inf == 0 && min_act > row.rhs + tol) return false;
    if (ge && max_inf == 0 && max_act < row.rhs - tol) return false;
    const bool le_slack = !le || (max_inf == 0 && max_act <= row.rhs + tol);
    const bool ge_slack = !ge || (min_inf == 0 && min_act >= row.rhs - tol);
    if (le_slack && ge_slack) {
      row.active = false;
      changed = true;
      return true;
    }
    for (const auto& t : row.terms) {
      const int j = t.column;
      if (fixed(j) || model_.variables()[j].kind != VarKind::kBinary) continue;
      const double a = t.coef;
      if (le && min_inf == 0) {
        const double rest = min_act - (a > 0 ? a * lb_[j] : a * ub_[j]);
        if (a > 0 && rest + a > row.rhs + tol) { ub_[j] = 0.0; changed = true; return true; }
        if (a < 0 && rest > row.rhs + tol) { lb_[j] = 1.0; changed = true; return true; }
      }
      if (ge && max_inf == 0) {
        const double rest = max_act - (a > 0 ? a * ub_[j] : a * lb_[j]);
        if (a > 0 && rest < row.rhs - tol) { lb_[j] = 1.0; changed = true; return true; }
        if (a < 0 && rest + a < row.rhs - tol) { ub_[j] = 0.0; changed = true; return true; }
      }
    }
    return true;
  }

  // A column whose cost and rows all favour one direction can sit at that
  // bound in some optimal solution.
  bool fix_dominated() {
    bool changed = false;
    const auto& vars = model_.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (fixed(static_cast<int>(j))) continue;
      bool down = vars[j].objective >= 0.0;
      bool up = vars[j].objective <= 0.0 && !std::isinf(ub_[j]);
      for (int r : col_rows_[j]) {
        const auto& row = rows_[r];
        if (!row.active) continue;
        double a = 0.0;
        for (const auto& t : row.terms) {
          if (t.column == static_cast<int>(j)) a = t.coef;
        }
        if (row.sense == Sense::kEqual) {
          down = up = false;
        } else if ((row.sense == Sense::kLessEqual) == (a > 0)) {
          up = false;
        } else {
          down = false;
        }
        if (!down && !up) break;
      }
      if (down) {
        ub_[j] = lb_[j];
        changed = true;
      } else if (up) {
        lb_[j] = ub_[j];
        changed = true;
      }
    }
    return changed;
  }

  const MilpModel& model_;
  std::vector<double> lb_, ub_;
  std::vector<PRow> rows_;
  std::vector<std::vector<int>> col_rows_;
  bool infeasible_ = false;
};

class BlockSolver {
 public:
  BlockSolver(const MilpModel& model, const Presolve& pre, const Block& block)
      : model_(model), pre_(pre), block_(block) {
    build();
  }

  BlockResult solve(const std::vector<double>* start, std::int64_t node_limit) {
    BlockResult res;
    Simplex sx(data_);
    LpState root = initial_state();
    if (!phase_one(sx, root)) return res;  // infeasible

    double incumbent = kInf;
    std::vector<double> best;
    if (start) try_start(*start, incumbent, best);

    struct Pending {
      LpState lp;
      int col;
      double value;
      double parent_bound;
    };
    std::vector<Pending> stack;
    LpState cur = std::move(root);
    bool have_cur = true;
    double cur_bound = -kInf;
    std::int64_t nodes = 0;
    bool limited = false;

    while (have_cur || !stack.empty()) {
      if (!have_cur) {
        Pending p = std::move(stack.back());
        stack.pop_back();
        if (p.parent_bound >= prune_level(incumbent)) continue;
        cur = std::move(p.lp);
        apply_fix(sx, cur, p.col, p.value);
        const auto st = sx.dual(cur);
        if (st == LpStatus::kInfeasible) continue;
        if (sx.primal(cur) != LpStatus::kOptimal) throw std::runtime_error("unbounded node");
        have_cur = true;
      }
      if (nodes >= node_limit) {
        limited = true;
        break;
      }
      ++nodes;
      const double value = sx.objective(cur);
      cur_bound = value;
      if (value >= prune_level(incumbent)) {
        have_cur = false;
        continue;
      }
      int branch = -1;
      double most = kIntTol;
      for (int j = 0; j < data_.n_struct; ++j) {
        if (!data_.binary[j]) continue;
        const double f = cur.x[j] - std::floor(cur.x[j]);
        const double dist = std::min(f, 1.0 - f);
        if (dist > most) {
          most = dist;
          branch = j;
        }
      }
      if (branch < 0) {
        std::vector<double> vals(cur.x.begin(), cur.x.begin() + data_.n_struct);
        for (int j = 0; j < data_.n_struct; ++j) {
          if (data_.binary[j]) vals[j] = std::round(vals[j]);
          else vals[j] = std::max(vals[j], 0.0);
        }
        const double obj = block_objective(vals);
        if (obj < incumbent) {
          incumbent = obj;
          best = std::move(vals);
        }
        have_cur = false;
        continue;
      }
      const double up_first = cur.x[branch] >= 0.5 ? 1.0 : 0.0;
      stack.push_back({cur, branch, 1.0 - up_first, value});
      apply_fix(sx, cur, branch, up_first);
      const auto st = sx.dual(cur);
      if (st == LpStatus::kInfeasible) {
        have_cur = false;
        continue;
      }
      if (sx.primal(cur) != LpStatus::kOptimal) throw std::runtime_error("unbounded node");
    }
    (void)cur_bound;
    res.nodes = nodes;
    if (limited) {
      double bound = have_cur ? sx.objective(cur) : kInf;
      for (const auto& p : stack) bound = std::min(bound, p.parent_bound);
      res.bound = std::min(bound, incumbent);
      res.status = MipStatus::kNodeLimit;
      if (!best.empty()) {
        res.objective = incumbent;
        res.values = std::move(best);
      }
      return res;
    }
    if (best.empty()) return res;
    res.status = MipStatus::kOptimal;
    res.objective = incumbent;
    res.bound = incumbent;
    res.values = std::move(best);
    return res;
  }

 private:
  static double prune_level(double incumbent) {
    return incumbent - 1e-10 * std::max(1.0, std::abs(incumbent));
  }

  void build() {
    const int m = static_cast<int>(block_.rows.size());
    const int ns = static_cast<int>(block_.cols.size());
    std::vector<int> local(model_.num_variables(), -1);
    for (int k = 0; k < ns; ++k) local[block_.cols[k]] = k;
    const auto& vars = model_.variables();

    // Rows as dense structural parts with fixed columns moved to the rhs.
    std::vector<double> rows_dense(static_cast<std::size_t>(m) * ns, 0.0);
    rhs_.assign(m, 0.0);
    senses_.resize(m);
    for (int r = 0; r < m; ++r) {
      const auto& row = pre_.row(block_.rows[r]);
      double rhs = row.rhs;
      for (const auto& t : row.terms) {
        if (local[t.column] >= 0) rows_dense[static_cast<std::size_t>(r) * ns + local[t.column]] = t.coef;
        else rhs -= t.coef * pre_.lb(t.column);
      }
      rhs_[r] = rhs;
      senses_[r] = row.sense;
    }
    dense_rows_ = std::move(rows_dense);

    // Which rows need an artificial at the all-lower-bound start.
    std::vector<double> act(m, 0.0);
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < ns; ++k) {
        act[r] += dense_rows_[static_cast<std::size_t>(r) * ns + k] * pre_.lb(block_.cols[k]);
      }
    }
    art_sign_.assign(m, 0);
    int n_art = 0;
    for (int r = 0; r < m; ++r) {
      const double resid = rhs_[r] - act[r];
      const bool ok = senses_[r] == Sense::kLessEqual   ? resid >= 0
                      : senses_[r] == Sense::kGreaterEqual ? resid <= 0
                                                            : resid == 0;
      if (!ok) {
        art_sign_[r] = resid > 0 ? 1 : -1;
        ++n_art;
      }
    }
    data_.m = m;
    data_.n_struct = ns;
    data_.n = ns + m + n_art;
    data_.a.assign(static_cast<std::size_t>(m) * data_.n, 0.0);
    data_.b = rhs_;
    data_.cost.assign(data_.n, 0.0);
    data_.binary.assign(ns, 0);
    for (int k = 0; k < ns; ++k) {
      data_.cost[k] = vars[block_.cols[k]].objective;
      data_.binary[k] = vars[block_.cols[k]].kind == VarKind::kBinary;
    }
    int art = ns + m;
    art_col_.assign(m, -1);
    for (int r = 0; r < m; ++r) {
      double* row = &data_.a[static_cast<std::size_t>(r) * data_.n];
      for (int k = 0; k < ns; ++k) row[k] = dense_rows_[static_cast<std::size_t>(r) * ns + k];
      row[ns + r] = 1.0;
      if (art_sign_[r] != 0) {
        row[art] = art_sign_[r];
        art_col_[r] = art++;
      }
    }
    start_act_ = std::move(act);
  }

  LpState initial_state() const {
    const int m = data_.m;
    const int n = data_.n;
    const int ns = data_.n_struct;
    LpState s;
    s.lb.assign(n, 0.0);
    s.ub.assign(n, kInf);
    s.x.assign(n, 0.0);
    for (int k = 0; k < ns; ++k) {
      s.lb[k] = pre_.lb(block_.cols[k]);
      s.ub[k] = pre_.ub(block_.cols[k]);
      s.x[k] = s.lb[k];
    }
    s.basis.resize(m);
    s.row_of.assign(n, -1);
    for (int r = 0; r < m; ++r) {
      const int slack = ns + r;
      if (senses_[r] == Sense::kGreaterEqual) {
        s.lb[slack] = -kInf;
        s.ub[slack] = 0.0;
      } else if (senses_[r] == Sense::kEqual) {
        s.ub[slack] = 0.0;
      }
      const double resid = rhs_[r] - start_act_[r];
      if (art_col_[r] < 0) {
        s.basis[r] = slack;
        s.x[slack] = resid;
      } else {
        s.basis[r] = art_col_[r];
        s.x[slack] = 0.0;
        s.x[art_col_[r]] = std::abs(resid);
      }
      s.row_of[s.basis[r]] = r;
    }
    s.t.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int r = 0; r < m; ++r) {
      const double scale = data_.a[static_cast<std::size_t>(r) * n + s.basis[r]];
      for (int j = 0; j < n; ++j) s.t[static_cast<std::size_t>(r) * n + j] = data_.a[static_cast<std::size_t>(r) * n + j] / scale;
    }
    return s;
  }

  bool phase_one(const Simplex& sx, LpState& s) const {
    const int n = data_.n;
    const int first_art = data_.n_struct + data_.m;
    if (first_art < n) {
      s.cost.assign(n, 0.0);
      for (int j = first_art; j < n; ++j) s.cost[j] = 1.0;
      sx.compute_reduced_costs(s);
      if (sx.primal(s) != LpStatus::kOptimal) throw std::runtime_error("phase one failed");
      double infeas = 0.0;
      for (int j = first_art; j < n; ++j) infeas += s.x[j];
      if (infeas > 1e-8) return false;
      for (int j = first_art; j < n; ++j) {
        s.lb[j] = s.ub[j] = 0.0;
        if (s.row_of[j] < 0) s.x[j] = 0.0;
      }
    }
    s.cost = data_.cost;
    sx.refactor(s);
    if (sx.dual(s) == LpStatus::kInfeasible) return false;
    const auto st = sx.primal(s);
    if (st == LpStatus::kUnbounded) throw std::runtime_error("unbounded relaxation");
    return true;
  }

  void apply_fix(const Simplex& sx, LpState& s, int col, double value) const {
    s.lb[col] = s.ub[col] = value;
    if (s.row_of[col] >= 0) return;
    const double delta = value - s.x[col];
    if (delta == 0.0) return;
    s.x[col] = value;
    for (int r = 0; r < data_.m; ++r) {
      const double a = sx.t(s, r, col);
      if (a != 0.0) s.x[s.basis[r]] -= a * delta;
    }
  }

  double block_objective(const std::vector<double>& vals) const {
    double v = 0.0;
    for (int k = 0; k < data_.n_struct; ++k) v += data_.cost[k] * vals[k];
    return v;
  }

  void try_start(const std::vector<double>& start, double& incumbent,
                 std::vector<double>& best) const {
    const int ns = data_.n_struct;
    std::vector<double> vals(ns);
    for (int k = 0; k < ns; ++k) {
      const double v = start[block_.cols[k]];
      if (v < pre_.lb(block_.cols[k]) - 1e-9 || v > pre_.ub(block_.cols[k]) + 1e-9) return;
      if (data_.binary[k] && std::abs(v - std::round(v)) > 1e-9) return;
      vals[k] = data_.binary[k] ? std::round(v) : v;
    }
    for (int r = 0; r < data_.m; ++r) {
      double lhs = 0.0;
      for (int k = 0; k < ns; ++k) lhs += dense_rows_[static_cast<std::size_t>(r) * ns + k] * vals[k];
      const double tol = 1e-7 * std::max(1.0, std::abs(rhs_[r]));
      if (senses_[r] != Sense::kGreaterEqual && lhs > rhs_[r] + tol) return;
      if (senses_[r] != Sense::kLessEqual && lhs < rhs_[r] - tol) return;
    }
    const double obj = block_objective(vals);
    if (obj < incumbent) {
      incumbent = obj;
      best = std::move(vals);
    }
  }

  const MilpModel& model_;
  const Presolve& pre_;
  const Block& block_;
  LpData data_;
  std::vector<double> dense_rows_;
  std::vector<double> rhs_;
  std::vector<Sense> senses_;
  std::vector<int> art_sign_;
  std::vector<int> art_col_;
  std::vector<double> start_act_;
};

}  // namespace

MipResult solve_mip(const MilpModel& model, const MipOptions& options) {
  MipResult result;
  const std::size_t n = model.num_variables();
  if (!options.start.empty() && options.start.size() != n) {
    throw InputError("MIP start has the wrong length");
  }
  Presolve pre(model, options);
  if (!pre.run()) return result;

  std::vector<double> values(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (pre.fixed(static_cast<int>(j))) values[j] = pre.lb(static_cast<int>(j));
  }
  const auto blocks = pre.blocks();
  result.components = static_cast<int>(blocks.size());
  bool limited = false;
  double bound = 0.0;
  for (std::size_t j = 0; j < n; ++j) bound += model.variables()[j].objective * values[j] * pre.fixed(static_cast<int>(j));
  std::int64_t nodes_left = options.node_limit;
  for (const auto& block : blocks) {
    BlockSolver solver(model, pre, block);
    auto br = solver.solve(options.start.empty() ? nullptr : &options.start, std::max<std::int64_t>(nodes_left, 1));
    result.nodes += br.nodes;
    nodes_left -= br.nodes;
    if (br.status == MipStatus::kInfeasible) {
      result.status = MipStatus::kInfeasible;
      result.values.clear();
      return result;
    }
    if (br.status == MipStatus::kNodeLimit) limited = true;
    bound += br.bound;
    if (br.values.empty()) {
      limited = true;
      continue;
    }
    for (std::size_t k = 0; k < block.cols.size(); ++k) values[block.cols[k]] = br.values[k];
  }
  result.bound = bound;
  result.status = limited ? MipStatus::kNodeLimit : MipStatus::kOptimal;
  if (!limited || model.max_violation(values) <= 1e-7) {
    result.values = std::move(values);
    result.objective = model.objective_value(result.values);
  }
  return result;
}

}  // namespace flpbd::milp
