#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flpbd {

/// Recourse policy applied when a facility's assigned demand exceeds its capacity.
enum class Policy {
  kFacilityOutsourcing,       // FO
  kCostDrivenOutsourcing,     // CD-CO
  kOrderDrivenOutsourcing,    // OD-CO
  kReassignmentOutsourcing,   // RO
};

inline constexpr Policy kAllPolicies[] = {
    Policy::kFacilityOutsourcing, Policy::kCostDrivenOutsourcing,
    Policy::kOrderDrivenOutsourcing, Policy::kReassignmentOutsourcing};

inline constexpr std::size_t kNumPolicies = 4;

constexpr std::size_t policy_index(Policy p) { return static_cast<std::size_t>(p); }

/// Short lowercase key used on the command line and in file names ("fo", "cdco", ...).
std::string_view policy_key(Policy p);
/// Display name as used in reports ("FO", "CD-CO", ...).
std::string_view policy_label(Policy p);
/// Accepts either the key or the label, case-insensitive.
Policy parse_policy(std::string_view text);

/// Malformed or inconsistent input data (files, dimensions, values).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A first-stage solution that violates assignment, linking or lower-bound rows.
class InfeasibleSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute tolerance on objective values.
inline constexpr double kObjectiveTol = 1e-9;

inline bool approx_equal_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace flpbd
