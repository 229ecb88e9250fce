#include "flpbd/common.hpp"

#include <cctype>

namespace flpbd {

std::string_view policy_key(Policy p) {
  switch (p) {
    case Policy::kFacilityOutsourcing: return "fo";
    case Policy::kCostDrivenOutsourcing: return "cdco";
    case Policy::kOrderDrivenOutsourcing: return "odco";
    case Policy::kReassignmentOutsourcing: return "ro";
  }
  return "?";
}

std::string_view policy_label(Policy p) {
  switch (p) {
    case Policy::kFacilityOutsourcing: return "FO";
    case Policy::kCostDrivenOutsourcing: return "CD-CO";
    case Policy::kOrderDrivenOutsourcing: return "OD-CO";
    case Policy::kReassignmentOutsourcing: return "RO";
  }
  return "?";
}

Policy parse_policy(std::string_view text) {
  std::string norm;
  for (char ch : text) {
    if (ch == '-' || ch == '_') continue;
    norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (Policy p : kAllPolicies) {
    if (norm == policy_key(p)) return p;
  }
  throw InputError("unknown policy '" + std::string(text) + "' (expected fo, cdco, odco or ro)");
}

}  // namespace flpbd
