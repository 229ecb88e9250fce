#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string_view>
#include <vector>

#include "flpbd/instance.hpp"

namespace flpbd {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Demand-probability mix over low / medium / high customers.
enum class DemandPattern { kPT1, kPT2 };  // 20/60/20 and 20/20/60 percent

/// Setup-cost standard deviation relative to its mean mu: 0, mu/10, mu/3.
enum class SetupVariability { kNone, kTenth, kThird };

enum class LowerBoundMode { kZero, kPositive };

DemandPattern parse_pattern(std::string_view text);
SetupVariability parse_setup_variability(std::string_view text);
LowerBoundMode parse_lower_bound_mode(std::string_view text);
std::string_view pattern_name(DemandPattern p);

struct GeneratorConfig {
  std::vector<Point> coords;
  std::size_t n_sites = 0;
  std::size_t n_customers = 0;
  DemandPattern pattern = DemandPattern::kPT1;
  int gamma = 1;  // capacity factor, one of 1, 2, 4
  SetupVariability setup_variability = SetupVariability::kTenth;
  LowerBoundMode ell_mode = LowerBoundMode::kPositive;
  std::uint64_t seed = 0;
  int target_open = 5;          // facility count the base capacity is sized for
  double penalty_factor = 1.5;  // g_i = penalty_factor * max_j c_ij
};

/// Counts of low, medium and high probability customers for n customers.
/// Low and high get round(fraction * n); medium takes the remainder.
struct ClassCounts {
  std::size_t low = 0, medium = 0, high = 0;
};
ClassCounts class_counts(DemandPattern pattern, std::size_t n_customers);

/// Builds an instance: sites and customers are distinct points drawn without
/// replacement; c_ij is the Euclidean distance rounded to 2 decimals.
/// Throws InputError for an invalid configuration or too few points.
Instance generate_instance(const GeneratorConfig& cfg);

/// TSPLIB NODE_COORD_SECTION reader; EUC_2D only.
std::vector<Point> parse_tsplib(std::istream& in);
std::vector<Point> load_coords(const std::filesystem::path& path);

/// Uniform points on [0, 1000)^2, coordinates rounded to integers like most
/// EUC_2D files.
std::vector<Point> synthetic_coords(std::size_t count, std::uint64_t seed);

double euclidean_rounded(const Point& a, const Point& b);

}  // namespace flpbd
