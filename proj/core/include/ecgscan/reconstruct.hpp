#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecgscan/paper_layout.hpp"
#include "ecgscan/row_detect.hpp"
#include "ecgscan/signal_set.hpp"

namespace ecgscan {

/// Column range [col_begin, col_end) of one panel inside a row band.
struct PanelRange {
  int col_begin = 0;
  int col_end = 0;
  double x_origin_px = 0.0;  ///< exact left edge of the panel, px
  int row = 0;               ///< layout row; layout.rows for the rhythm strip
  int col = 0;
  bool rhythm = false;
  std::string lead;

  int width() const { return col_end - col_begin; }
};

/// Splits the plotted width [margin, image_width - margin) of a band into
/// layout.cols equal panels, or a single panel for the rhythm band
/// (band.index == layout.rows).
std::vector<PanelRange> segment_panels(const RowBand& band, const PaperLayout& layout,
                                       int image_width, double px_per_mm);

inline std::vector<PanelRange> segment_panels(const RowBand& band, const PaperLayout& layout,
                                              int image_width) {
  return segment_panels(band, layout, image_width, layout.px_per_mm());
}

/// Median of the trace ordinates.
double estimate_baseline(std::span<const double> dense_y);

struct CalibrationParams {
  double px_per_mm = 0.0;
  double mm_per_s = 25.0;
  double mm_per_mV = 10.0;
  double baseline_y_px = 0.0;
  double target_fs = 500.0;
  /// Column j of the trace sits at time (j + pixel_phase_px) / (px per s).
  double pixel_phase_px = 0.0;

  /// Throws ValidationError unless the scale factors and rate are positive.
  void validate() const;
};

/// Millivolt samples at target_fs starting at the panel's t = 0, covering
/// round(width / px_per_s * target_fs) samples. Throws ReconstructionError
/// for traces narrower than two columns.
std::vector<double> path_to_signal(std::span<const double> dense_y, const CalibrationParams& calib);

struct PanelSignal {
  int row = 0;
  int col = 0;
  bool rhythm = false;
  std::vector<double> samples;  ///< panel-local, starting at the panel's first instant
};

/// Per-lead, per-sample flag: 1 where the lead was observed on the page.
using CoverageMap = std::vector<std::vector<std::uint8_t>>;

struct AssembledRecord {
  SignalSet signals;
  CoverageMap coverage;  ///< parallel to signals.lead_names
};

/// Places every segment panel at its time window in a rhythm_s record of the
/// 12 standard leads; unobserved samples stay zero. The rhythm panel, when
/// present, fills the uncovered samples of its lead. Throws AssemblyError
/// naming the first missing segment panel.
AssembledRecord assemble_record(const std::vector<PanelSignal>& panels, const PaperLayout& layout,
                                double target_fs);

/// Coverage as half-open sample intervals, per lead.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> coverage_intervals(
    const CoverageMap& coverage);
CoverageMap coverage_from_intervals(
    const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& intervals,
    std::size_t n_samples);

}  // namespace ecgscan
