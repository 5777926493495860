#include "ecgscan/paper_layout.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"

namespace ecgscan {

void PaperLayout::validate() const {
  if (!(mm_per_s > 0.0) || !(mm_per_mV > 0.0) || !(dpi > 0.0)) {
    throw ValidationError("mm_per_s, mm_per_mV and dpi must be positive");
  }
  if (!(small_grid_mm > 0.0) || !(large_grid_mm > 0.0)) {
    throw ValidationError("grid spacings must be positive");
  }
  const double ratio = large_grid_mm / small_grid_mm;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError("large_grid_mm must be an integer multiple of small_grid_mm");
  }
  if (rows <= 0 || cols <= 0 || rows * cols != 12) {
    throw ValidationError("rows x cols must equal 12");
  }
  if (!(segment_s > 0.0) || std::abs(segment_s * cols - rhythm_s) > 1e-9) {
    throw ValidationError("segment_s x cols must equal rhythm_s");
  }
  if (!(margin_mm >= 0.0) || !(row_height_mm > 0.0)) {
    throw ValidationError("margin_mm must be >= 0 and row_height_mm > 0");
  }
  std::set<int> seen;
  for (const auto& lead : lead_order) {
    auto idx = standard_lead_index(lead);
    if (!idx || *canonical_lead_name(lead) != lead) {
      throw ValidationError("lead_order entry '" + lead + "' is not a standard lead");
    }
    seen.insert(*idx);
  }
  if (seen.size() != 12) throw ValidationError("lead_order must be a permutation of the 12 leads");
  if (!is_standard_lead(rhythm_lead) || *canonical_lead_name(rhythm_lead) != rhythm_lead) {
    throw ValidationError("rhythm_lead '" + rhythm_lead + "' is not a standard lead");
  }
}

int PaperLayout::page_width_px() const {
  return static_cast<int>(std::lround(mm_to_px(page_width_mm(), dpi)));
}

int PaperLayout::page_height_px() const {
  return static_cast<int>(std::lround(mm_to_px(page_height_mm(), dpi)));
}

std::vector<PanelPlacement> plan_panels(const PaperLayout& layout) {
  layout.validate();
  std::vector<PanelPlacement> panels;
  const double panel_w = layout.segment_s * layout.mm_per_s;
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      PanelPlacement p;
      p.lead = layout.lead_order[static_cast<std::size_t>(r * layout.cols + c)];
      p.row = r;
      p.col = c;
      p.t_begin_s = c * layout.segment_s;
      p.t_end_s = (c + 1) * layout.segment_s;
      p.box.x0 = layout.margin_mm + c * panel_w;
      p.box.x1 = p.box.x0 + panel_w;
      p.box.y0 = layout.margin_mm + r * layout.row_height_mm;
      p.box.y1 = p.box.y0 + layout.row_height_mm;
      p.baseline_mm = layout.baseline_mm(r);
      panels.push_back(std::move(p));
    }
  }
  PanelPlacement rhythm;
  rhythm.lead = layout.rhythm_lead;
  rhythm.row = layout.rows;
  rhythm.col = 0;
  rhythm.rhythm = true;
  rhythm.t_begin_s = 0.0;
  rhythm.t_end_s = layout.rhythm_s;
  rhythm.box.x0 = layout.margin_mm;
  rhythm.box.x1 = layout.margin_mm + layout.rhythm_s * layout.mm_per_s;
  rhythm.box.y0 = layout.margin_mm + layout.rows * layout.row_height_mm;
  rhythm.box.y1 = rhythm.box.y0 + layout.row_height_mm;
  rhythm.baseline_mm = layout.baseline_mm(layout.rows);
  panels.push_back(std::move(rhythm));
  return panels;
}

void to_json(nlohmann::json& j, const PaperLayout& l) {
  j = nlohmann::json{{"mm_per_s", l.mm_per_s},
                     {"mm_per_mV", l.mm_per_mV},
                     {"dpi", l.dpi},
                     {"rows", l.rows},
                     {"cols", l.cols},
                     {"segment_s", l.segment_s},
                     {"rhythm_lead", l.rhythm_lead},
                     {"rhythm_s", l.rhythm_s},
                     {"margin_mm", l.margin_mm},
                     {"row_height_mm", l.row_height_mm},
                     {"small_grid_mm", l.small_grid_mm},
                     {"large_grid_mm", l.large_grid_mm},
                     {"lead_order", l.lead_order},
                     {"draw_labels", l.draw_labels},
                     {"draw_calibration_pulse", l.draw_calibration_pulse}};
}

void from_json(const nlohmann::json& j, PaperLayout& l) {
  PaperLayout d;
  l.mm_per_s = j.value("mm_per_s", d.mm_per_s);
  l.mm_per_mV = j.value("mm_per_mV", d.mm_per_mV);
  l.dpi = j.value("dpi", d.dpi);
  l.rows = j.value("rows", d.rows);
  l.cols = j.value("cols", d.cols);
  l.segment_s = j.value("segment_s", d.segment_s);
  l.rhythm_lead = j.value("rhythm_lead", d.rhythm_lead);
  l.rhythm_s = j.value("rhythm_s", d.rhythm_s);
  l.margin_mm = j.value("margin_mm", d.margin_mm);
  l.row_height_mm = j.value("row_height_mm", d.row_height_mm);
  l.small_grid_mm = j.value("small_grid_mm", d.small_grid_mm);
  l.large_grid_mm = j.value("large_grid_mm", d.large_grid_mm);
  l.lead_order = j.value("lead_order", d.lead_order);
  l.draw_labels = j.value("draw_labels", d.draw_labels);
  l.draw_calibration_pulse = j.value("draw_calibration_pulse", d.draw_calibration_pulse);
}

}  // namespace ecgscan
