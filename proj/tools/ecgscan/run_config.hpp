#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ecgscan/digitize.hpp"
#include "ecgscan/metrics.hpp"
#include "ecgscan/paper_layout.hpp"
#include "ecgscan/paper_render.hpp"

namespace ecgscan::cli {

/// Every setting of every subcommand. JSON keys are the member names; the
/// matching flag is the kebab-case spelling (max_lag_s -> --max-lag-s).
struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 0;  ///< 0 = hardware concurrency
  bool verbose = false;

  std::string input;
  std::string output;
  std::string reference;

  // gen-corpus
  int count = 20;
  double duration_s = 10.0;
  double fs = 500.0;
  double hr_min = 50.0;
  double hr_max = 100.0;
  double gain = 2000.0;

  // page layout; dpi also overrides image metadata when digitizing
  std::optional<double> dpi;
  double mm_per_s = 25.0;
  double mm_per_mv = 10.0;
  double margin_mm = 10.0;
  double row_height_mm = 40.0;
  std::string rhythm_lead = "II";
  bool labels = false;
  bool calibration_pulse = false;

  // degradation
  double noise_sigma = 0.0;
  double rotation_deg = 0.0;
  int trace_thickness_px = 2;
  int grid_intensity = 200;
  int trace_intensity = 0;

  // digitize
  std::string row_detector = "projection";
  double target_fs = 500.0;
  bool debug = false;

  // evaluate
  bool align = true;
  double max_lag_s = 0.5;
  double asci_beta = 0.05;
  bool use_coverage = true;

  /// Throws ValidationError on out-of-range or conflicting settings.
  void validate() const;

  /// Layout for rendering; dpi defaults to 200 when unset.
  PaperLayout layout() const;
  DegradationSpec degradation(std::uint64_t record_seed) const;
  DigitizeOptions digitize_options() const;
  MetricsOptions metrics_options() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Starts from `c` and overwrites the keys present. Unknown keys and
/// mistyped values throw ValidationError.
void merge_json(const nlohmann::json& j, RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// Default render resolution when --dpi is not given.
inline constexpr double kDefaultRenderDpi = 200.0;

}  // namespace ecgscan::cli
