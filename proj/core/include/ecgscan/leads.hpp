#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace ecgscan {

inline constexpr std::array<std::string_view, 12> kStandardLeads = {
    "I", "II", "III", "aVR", "aVL", "aVF", "V1", "V2", "V3", "V4", "V5", "V6"};

/// Index into kStandardLeads, matching case-insensitively ("avr" -> 3).
std::optional<int> standard_lead_index(std::string_view name);

/// Canonical spelling of a standard lead name, if it is one.
std::optional<std::string> canonical_lead_name(std::string_view name);

inline bool is_standard_lead(std::string_view name) {
  return standard_lead_index(name).has_value();
}

}  // namespace ecgscan
