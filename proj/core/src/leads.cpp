#include "ecgscan/leads.hpp"

#include <cctype>

namespace ecgscan {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<int> standard_lead_index(std::string_view name) {
  for (std::size_t i = 0; i < kStandardLeads.size(); ++i) {
    if (iequals(name, kStandardLeads[i])) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<std::string> canonical_lead_name(std::string_view name) {
  if (auto idx = standard_lead_index(name)) return std::string(kStandardLeads[*idx]);
  return std::nullopt;
}

}  // namespace ecgscan
