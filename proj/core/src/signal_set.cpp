#include "ecgscan/signal_set.hpp"

#include <set>

#include "ecgscan/errors.hpp"

namespace ecgscan {

std::optional<std::size_t> SignalSet::find_lead(std::string_view name) const {
  for (std::size_t i = 0; i < lead_names.size(); ++i) {
    if (lead_names[i] == name) return i;
  }
  return std::nullopt;
}

const std::vector<double>& SignalSet::lead(std::string_view name) const {
  auto idx = find_lead(name);
  if (!idx) throw ValidationError("signal set has no lead '" + std::string(name) + "'");
  return samples[*idx];
}

void SignalSet::validate() const {
  if (!(sampling_hz > 0.0)) throw ValidationError("sampling rate must be positive");
  if (samples.size() != lead_names.size()) {
    throw ValidationError("lead name count does not match sample rows");
  }
  std::set<std::string> seen;
  for (const auto& name : lead_names) {
    if (!seen.insert(name).second) throw ValidationError("duplicate lead '" + name + "'");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].size() != samples[0].size()) {
      throw ValidationError("lead '" + lead_names[i] + "' length differs from '" +
                            lead_names[0] + "'");
    }
  }
}

}  // namespace ecgscan
