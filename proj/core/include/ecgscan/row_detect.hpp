#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ecgscan/raster.hpp"

namespace ecgscan {

/// Horizontal strip [y_top, y_bottom) holding one row of traces.
struct RowBand {
  int y_top = 0;
  int y_bottom = 0;
  int index = 0;  ///< 0 = topmost

  double center() const { return 0.5 * (y_top + y_bottom); }
  int height() const { return y_bottom - y_top; }
};

struct RowDetectConfig {
  int smoothing_px = 9;
  double band_fraction = 0.1;
  int merge_gap_px = 15;
  int pad_px = 10;
};

struct RowDetection {
  std::vector<RowBand> bands;  ///< disjoint, sorted top to bottom
  bool short_count = false;    ///< fewer bands than expected were found
};

/// Interface for signal-row detectors, so learned models can be slotted in
/// next to the projection-profile detector.
class RowDetector {
 public:
  virtual ~RowDetector() = default;
  virtual std::string_view name() const = 0;
  /// Throws NoSignalError on a mask without ink.
  virtual RowDetection detect(const InkMask& mask, int expected) const = 0;
};

/// Smoothed horizontal projection profile, thresholded at band_fraction of
/// the way from its median to its peak; runs are merged and the heaviest `expected` kept. Each band is
/// symmetric about its profile maximum and padded by pad_px.
class ProjectionRowDetector final : public RowDetector {
 public:
  explicit ProjectionRowDetector(RowDetectConfig config = {}) : config_(config) {}
  std::string_view name() const override { return "projection"; }
  RowDetection detect(const InkMask& mask, int expected) const override;

 private:
  RowDetectConfig config_;
};

inline RowDetection detect_rows(const InkMask& mask, int expected = 4,
                                const RowDetectConfig& config = {}) {
  return ProjectionRowDetector(config).detect(mask, expected);
}

using RowDetectorFactory = std::function<std::unique_ptr<RowDetector>(const RowDetectConfig&)>;

/// Registers (or replaces) a detector under `name`. "projection" is built in.
void register_row_detector(const std::string& name, RowDetectorFactory factory);
/// Throws ValidationError for unknown names.
std::unique_ptr<RowDetector> make_row_detector(std::string_view name,
                                               const RowDetectConfig& config = {});
std::vector<std::string> row_detector_names();

}  // namespace ecgscan
