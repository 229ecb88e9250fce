#include "flpbd/xeval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace flpbd {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

bool GapMatrix::has(Policy row, Policy col) const { return !std::isnan(at(row, col)); }

bool GapMatrix::asymmetric(double tol) const {
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    for (std::size_t b = a + 1; b < kNumPolicies; ++b) {
      const double ab = gap[a][b];
      const double ba = gap[b][a];
      if (std::isnan(ab) || std::isnan(ba)) continue;
      if (std::abs(ab - ba) > tol) return true;
    }
  }
  return false;
}

GapMatrix cross_gap(const Instance& inst, const ScenarioSet& scen,
                    const PerPolicy<std::optional<FirstStageSolution>>& solutions,
                    const PerPolicy<std::optional<double>>& optima,
                    const PerPolicy<bool>& proven) {
  GapMatrix m;
  m.proven = proven;
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    for (std::size_t b = 0; b < kNumPolicies; ++b) {
      m.gap[a][b] = kNaN;
      m.cost[a][b] = kNaN;
      m.flagged[a][b] = false;
    }
  }
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    if (!solutions[a]) continue;
    for (std::size_t b = 0; b < kNumPolicies; ++b) {
      const double cost = expected_total(inst, scen, *solutions[a], kAllPolicies[b]);
      m.cost[a][b] = cost;
      if (!optima[b]) continue;
      const double z = *optima[b];
      m.gap[a][b] = cost == z ? 0.0 : 100.0 * (cost - z) / z;
      m.flagged[a][b] = m.gap[a][b] < 0.0 && !proven[b];
    }
  }
  return m;
}

GapSummary summarize_gaps(std::span<const GapMatrix> matrices) {
  GapSummary s;
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    for (std::size_t b = 0; b < kNumPolicies; ++b) {
      double sum = 0.0;
      for (const auto& m : matrices) {
        if (std::isnan(m.gap[a][b])) {
          ++s.excluded[a][b];
        } else {
          sum += m.gap[a][b];
          ++s.count[a][b];
        }
      }
      s.mean[a][b] = s.count[a][b] ? sum / static_cast<double>(s.count[a][b]) : kNaN;
    }
  }
  return s;
}

CostStructure cost_breakdown(const PolicyEvaluation& evaluation) {
  CostStructure cs;
  cs.policy = evaluation.policy;
  const auto& b = evaluation.breakdown;
  cs.total = evaluation.expected_cost;
  if (cs.total == 0.0) {
    cs.zero_total = true;
    return cs;
  }
  cs.opening = b.opening / cs.total;
  cs.service = b.service / cs.total;
  cs.penalty = b.penalty / cs.total;
  cs.reassign = b.reassign / cs.total;
  return cs;
}

OpenFacilityStats open_facility_stats(
    std::span<const PerPolicy<std::optional<FirstStageSolution>>> batch) {
  if (batch.empty()) throw InputError("open-facility statistics need a nonempty batch");
  OpenFacilityStats st;
  for (std::size_t p = 0; p < kNumPolicies; ++p) {
    double sum = 0.0;
    for (const auto& row : batch) {
      if (!row[p]) continue;
      sum += static_cast<double>(row[p]->open_count());
      ++st.count[p];
    }
    st.mean[p] = st.count[p] ? sum / static_cast<double>(st.count[p]) : kNaN;
  }
  return st;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_gap_csv(const GapMatrix& m, std::ostream& out) {
  out << "solution_policy";
  for (Policy p : m.policies) out << ',' << policy_label(p);
  out << '\n';
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    out << policy_label(m.policies[a]);
    for (std::size_t b = 0; b < kNumPolicies; ++b) out << ',' << csv_number(m.gap[a][b]);
    out << '\n';
  }
}

void write_gap_summary_csv(const GapSummary& s, std::ostream& out) {
  out << "solution_policy,evaluation_policy,mean_gap_pct,instances,excluded\n";
  for (std::size_t a = 0; a < kNumPolicies; ++a) {
    for (std::size_t b = 0; b < kNumPolicies; ++b) {
      out << policy_label(kAllPolicies[a]) << ',' << policy_label(kAllPolicies[b]) << ','
          << csv_number(s.mean[a][b]) << ',' << s.count[a][b] << ',' << s.excluded[a][b] << '\n';
    }
  }
}

}  // namespace flpbd
