#include "flpbd/genbench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "flpbd/random.hpp"

namespace flpbd {
namespace {

struct ProbabilityRange {
  double lo, hi;
};
constexpr ProbabilityRange kLow{0.10, 0.25};
constexpr ProbabilityRange kMedium{0.40, 0.60};
constexpr ProbabilityRange kHigh{0.75, 0.90};

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

DemandPattern parse_pattern(std::string_view text) {
  const auto t = lower(text);
  if (t == "pt1" || t == "1") return DemandPattern::kPT1;
  if (t == "pt2" || t == "2") return DemandPattern::kPT2;
  throw InputError("unknown demand pattern '" + std::string(text) + "'");
}

std::string_view pattern_name(DemandPattern p) {
  return p == DemandPattern::kPT1 ? "PT1" : "PT2";
}

SetupVariability parse_setup_variability(std::string_view text) {
  const auto t = lower(text);
  if (t == "none" || t == "0") return SetupVariability::kNone;
  if (t == "tenth" || t == "low" || t == "mu/10") return SetupVariability::kTenth;
  if (t == "third" || t == "high" || t == "mu/3") return SetupVariability::kThird;
  throw InputError("unknown setup variability '" + std::string(text) + "'");
}

LowerBoundMode parse_lower_bound_mode(std::string_view text) {
  const auto t = lower(text);
  if (t == "zero" || t == "0") return LowerBoundMode::kZero;
  if (t == "positive" || t == "pos") return LowerBoundMode::kPositive;
  throw InputError("unknown lower-bound mode '" + std::string(text) + "'");
}

ClassCounts class_counts(DemandPattern pattern, std::size_t n_customers) {
  const double low_frac = 0.2;
  const double high_frac = pattern == DemandPattern::kPT1 ? 0.2 : 0.6;
  const auto n = static_cast<double>(n_customers);
  ClassCounts counts;
  counts.low = static_cast<std::size_t>(std::llround(low_frac * n));
  counts.high = static_cast<std::size_t>(std::llround(high_frac * n));
  if (counts.low + counts.high > n_customers) counts.high = n_customers - counts.low;
  counts.medium = n_customers - counts.low - counts.high;
  return counts;
}

double euclidean_rounded(const Point& a, const Point& b) {
  return round2(std::hypot(a.x - b.x, a.y - b.y));
}

Instance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n_sites == 0 || cfg.n_customers == 0) {
    throw InputError("generator needs at least one site and one customer");
  }
  if (cfg.gamma != 1 && cfg.gamma != 2 && cfg.gamma != 4) {
    throw InputError("gamma must be 1, 2 or 4");
  }
  if (cfg.target_open < 1) throw InputError("target_open must be positive");
  if (!(cfg.penalty_factor >= 0.0)) throw InputError("penalty factor must be nonnegative");
  if (cfg.n_sites + cfg.n_customers > cfg.coords.size()) {
    throw InputError("insufficient points: need " +
                     std::to_string(cfg.n_sites + cfg.n_customers) + ", have " +
                     std::to_string(cfg.coords.size()));
  }

  Rng rng(cfg.seed);
  const std::size_t m = cfg.n_sites;
  const std::size_t n = cfg.n_customers;

  // Partial Fisher-Yates: the first m + n slots become sites then customers.
  std::vector<std::size_t> order(cfg.coords.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = 0; k < m + n; ++k) {
    const auto r = k + static_cast<std::size_t>(rng.below(order.size() - k));
    std::swap(order[k], order[r]);
  }

  Instance inst;
  inst.n_sites = m;
  inst.n_customers = n;
  inst.serve_cost.resize(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    inst.site_labels.push_back("node" + std::to_string(order[i] + 1));
    for (std::size_t j = 0; j < n; ++j) {
      inst.serve_cost[i * n + j] =
          euclidean_rounded(cfg.coords[order[i]], cfg.coords[order[m + j]]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    inst.customer_labels.push_back("node" + std::to_string(order[m + j] + 1));
  }

  // Demand classes: 0 = low, 1 = medium, 2 = high, randomly placed.
  const auto counts = class_counts(cfg.pattern, n);
  std::vector<int> cls;
  cls.insert(cls.end(), counts.low, 0);
  cls.insert(cls.end(), counts.medium, 1);
  cls.insert(cls.end(), counts.high, 2);
  rng.shuffle(std::span<int>(cls));
  inst.demand_prob.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& range = cls[j] == 0 ? kLow : (cls[j] == 1 ? kMedium : kHigh);
    inst.demand_prob[j] = rng.uniform(range.lo, range.hi);
  }

  const double mean_cost =
      std::accumulate(inst.serve_cost.begin(), inst.serve_cost.end(), 0.0) /
      static_cast<double>(m * n);
  const double mu = mean_cost * static_cast<double>(n) / static_cast<double>(m);
  double sigma = 0.0;
  if (cfg.setup_variability == SetupVariability::kTenth) sigma = mu / 10.0;
  if (cfg.setup_variability == SetupVariability::kThird) sigma = mu / 3.0;
  inst.open_cost.resize(m);
  for (std::size_t i = 0; i < m; ++i) inst.open_cost[i] = std::max(1.0, rng.normal(mu, sigma));

  // The base capacity is rounded before scaling so that capacities for
  // different gamma are exact multiples of each other.
  const double expected_demand =
      std::accumulate(inst.demand_prob.begin(), inst.demand_prob.end(), 0.0);
  const long base = std::max(1L, std::lround(expected_demand / cfg.target_open));
  inst.capacity.assign(m, static_cast<int>(cfg.gamma * base));

  const int ell = cfg.ell_mode == LowerBoundMode::kPositive
                      ? static_cast<int>(n / (2 * m))
                      : 0;
  inst.min_assigned.assign(m, ell);

  inst.outsource_penalty.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = inst.cost_row(i);
    inst.outsource_penalty[i] = cfg.penalty_factor * *std::max_element(row.begin(), row.end());
  }
  inst.reassign_penalty.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double best = inst.cost(0, j);
    for (std::size_t i = 1; i < m; ++i) best = std::min(best, inst.cost(i, j));
    inst.reassign_penalty[j] = 0.5 * best;
  }
  inst.external_cost =
      *std::max_element(inst.outsource_penalty.begin(), inst.outsource_penalty.end());
  return inst;
}

std::vector<Point> parse_tsplib(std::istream& in) {
  std::string line;
  std::size_t dimension = 0;
  bool have_dimension = false;
  std::string weight_type;
  bool in_coords = false;
  std::vector<Point> points;

  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!in_coords) {
      if (t == "NODE_COORD_SECTION") {
        in_coords = true;
        continue;
      }
      if (t == "EOF") break;
      const auto colon = t.find(':');
      if (colon == std::string::npos) {
        throw InputError("malformed TSPLIB header line: '" + t + "'");
      }
      const std::string key = trim(t.substr(0, colon));
      const std::string value = trim(t.substr(colon + 1));
      if (key == "DIMENSION") {
        try {
          dimension = static_cast<std::size_t>(std::stoul(value));
        } catch (const std::exception&) {
          throw InputError("bad DIMENSION value '" + value + "'");
        }
        have_dimension = true;
      } else if (key == "EDGE_WEIGHT_TYPE") {
        weight_type = value;
      } else if (key.find("SECTION") != std::string::npos) {
        throw InputError("unsupported TSPLIB section " + key);
      }
      continue;
    }
    if (t == "EOF") break;
    std::istringstream row(t);
    long id;
    Point p;
    if (!(row >> id >> p.x >> p.y)) throw InputError("malformed coordinate line: '" + t + "'");
    points.push_back(p);
  }

  if (!in_coords) throw InputError("TSPLIB file has no NODE_COORD_SECTION");
  if (weight_type != "EUC_2D") {
    throw InputError("unsupported EDGE_WEIGHT_TYPE '" + weight_type + "' (EUC_2D only)");
  }
  if (have_dimension && points.size() != dimension) {
    throw InputError("DIMENSION " + std::to_string(dimension) + " but " +
                     std::to_string(points.size()) + " coordinates");
  }
  return points;
}

std::vector<Point> load_coords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_tsplib(in);
}

std::vector<Point> synthetic_coords(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out(count);
  for (auto& p : out) {
    p.x = std::floor(rng.uniform(0.0, 1000.0));
    p.y = std::floor(rng.uniform(0.0, 1000.0));
  }
  return out;
}

}  // namespace flpbd
