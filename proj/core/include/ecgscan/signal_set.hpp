#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecgscan {

/// Physical range of a PTB-style 16-bit record, in millivolts.
inline constexpr double kRecordRangeMv = 16.384;

/// Multi-lead time series in millivolts. samples[i] is the lead named
/// lead_names[i]; all rows share sampling_hz and length.
struct SignalSet {
  double sampling_hz = 0.0;
  std::vector<std::string> lead_names;
  std::vector<std::vector<double>> samples;

  std::size_t n_leads() const { return lead_names.size(); }
  std::size_t n_samples() const { return samples.empty() ? 0 : samples.front().size(); }
  double duration_s() const {
    return sampling_hz > 0.0 ? static_cast<double>(n_samples()) / sampling_hz : 0.0;
  }

  std::optional<std::size_t> find_lead(std::string_view name) const;
  /// Throws ValidationError if the lead is absent.
  const std::vector<double>& lead(std::string_view name) const;

  /// Throws ValidationError on unequal rows, duplicate names or fs <= 0.
  void validate() const;
};

}  // namespace ecgscan
