#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ecgscan {

/// Geometry and calibration of a printed 12-lead ECG page: `rows` x `cols`
/// short segments followed by one full-width rhythm strip.
struct PaperLayout {
  double mm_per_s = 25.0;
  double mm_per_mV = 10.0;
  double dpi = 200.0;
  int rows = 3;
  int cols = 4;
  double segment_s = 2.5;
  std::string rhythm_lead = "II";
  double rhythm_s = 10.0;
  double margin_mm = 10.0;
  double row_height_mm = 40.0;
  double small_grid_mm = 1.0;
  double large_grid_mm = 5.0;
  /// Row-major lead per segment panel.
  std::array<std::string, 12> lead_order = {"I",  "aVR", "V1", "V4", "II",  "aVL",
                                            "V2", "V5",  "III", "aVF", "V3", "V6"};
  bool draw_labels = false;
  bool draw_calibration_pulse = false;

  /// Throws ValidationError when any layout invariant is broken.
  void validate() const;

  double px_per_mm() const { return dpi / 25.4; }
  double page_width_mm() const { return 2.0 * margin_mm + rhythm_s * mm_per_s; }
  double page_height_mm() const { return 2.0 * margin_mm + (rows + 1) * row_height_mm; }
  int page_width_px() const;
  int page_height_px() const;
  /// Baseline of strip `row` (rows == rhythm strip), millimetres from the top.
  double baseline_mm(int row) const { return margin_mm + (row + 0.5) * row_height_mm; }
};

/// Converts millimetres to pixels at `dpi`.
inline double mm_to_px(double mm, double dpi) { return mm * dpi / 25.4; }

struct BoxMm {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct PanelPlacement {
  std::string lead;
  int row = 0;  ///< 0..rows-1 for segments, `rows` for the rhythm strip
  int col = 0;
  bool rhythm = false;
  double t_begin_s = 0;  ///< window [t_begin_s, t_end_s)
  double t_end_s = 0;
  BoxMm box;
  double baseline_mm = 0;
};

/// 12 segment panels (row-major) followed by the rhythm panel.
std::vector<PanelPlacement> plan_panels(const PaperLayout& layout);

void to_json(nlohmann::json& j, const PaperLayout& layout);
void from_json(const nlohmann::json& j, PaperLayout& layout);

}  // namespace ecgscan
