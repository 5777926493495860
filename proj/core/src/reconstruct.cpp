#include "ecgscan/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"

namespace ecgscan {

std::vector<PanelRange> segment_panels(const RowBand& band, const PaperLayout& layout,
                                       int image_width, double px_per_mm) {
  if (band.index < 0 || band.index > layout.rows) {
    throw ContractViolation("band index " + std::to_string(band.index) + " outside the layout");
  }
  const double margin = layout.margin_mm * px_per_mm;
  const double left = std::clamp(margin, 0.0, static_cast<double>(image_width));
  const double right = std::max(left, image_width - margin);
  const auto edge = [&](double x) {
    return std::clamp(static_cast<int>(std::lround(x)), 0, image_width);
  };

  std::vector<PanelRange> out;
  if (band.index == layout.rows) {
    out.push_back({edge(left), edge(right), left, layout.rows, 0, true, layout.rhythm_lead});
    return out;
  }
  const double w = (right - left) / layout.cols;
  for (int c = 0; c < layout.cols; ++c) {
    const double x0 = left + c * w;
    const double x1 = c + 1 == layout.cols ? right : left + (c + 1) * w;
    const auto idx = static_cast<std::size_t>(band.index * layout.cols + c);
    out.push_back({edge(x0), edge(x1), x0, band.index, c, false, layout.lead_order.at(idx)});
  }
  return out;
}

double estimate_baseline(std::span<const double> dense_y) {
  if (dense_y.empty()) throw ContractViolation("baseline of an empty trace");
  std::vector<double> v(dense_y.begin(), dense_y.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void CalibrationParams::validate() const {
  if (!(px_per_mm > 0.0) || !(mm_per_s > 0.0) || !(mm_per_mV > 0.0) || !(target_fs > 0.0)) {
    throw ValidationError("calibration scale factors and target rate must be positive");
  }
  if (!std::isfinite(baseline_y_px) || !std::isfinite(pixel_phase_px)) {
    throw ValidationError("calibration offsets must be finite");
  }
}

std::vector<double> path_to_signal(std::span<const double> dense_y,
                                   const CalibrationParams& calib) {
  calib.validate();
  if (dense_y.size() < 2) throw ReconstructionError("panel narrower than 2 columns");
  const double px_per_s = calib.px_per_mm * calib.mm_per_s;
  const double px_per_mv = calib.px_per_mm * calib.mm_per_mV;
  const auto width = static_cast<double>(dense_y.size());
  const auto n = static_cast<std::size_t>(std::lround(width / px_per_s * calib.target_fs));
  const double last = width - 1.0;

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = std::clamp(static_cast<double>(k) / calib.target_fs * px_per_s -
                                    calib.pixel_phase_px,
                                0.0, last);
    const auto j = std::min(static_cast<std::size_t>(u), dense_y.size() - 2);
    const double f = u - static_cast<double>(j);
    const double y = dense_y[j] + f * (dense_y[j + 1] - dense_y[j]);
    out[k] = (calib.baseline_y_px - y) / px_per_mv;
  }
  return out;
}

AssembledRecord assemble_record(const std::vector<PanelSignal>& panels, const PaperLayout& layout,
                                double target_fs) {
  layout.validate();
  if (!(target_fs > 0.0)) throw ValidationError("target_fs must be positive");
  const auto total = static_cast<std::size_t>(std::lround(layout.rhythm_s * target_fs));

  AssembledRecord rec;
  rec.signals.sampling_hz = target_fs;
  for (auto name : kStandardLeads) rec.signals.lead_names.emplace_back(name);
  rec.signals.samples.assign(kStandardLeads.size(), std::vector<double>(total, 0.0));
  rec.coverage.assign(kStandardLeads.size(), std::vector<std::uint8_t>(total, 0));

  const auto lead_slot = [](const std::string& lead) {
    const auto idx = standard_lead_index(lead);
    if (!idx) throw ValidationError("not a standard lead: " + lead);
    return static_cast<std::size_t>(*idx);
  };
  const auto find = [&](int row, int col, bool rhythm) -> const PanelSignal* {
    for (const auto& p : panels) {
      if (p.rhythm == rhythm && p.row == row && (rhythm || p.col == col)) return &p;
    }
    return nullptr;
  };

  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const PanelSignal* p = find(r, c, false);
      if (!p) throw AssemblyError(r, c, "panel missing");
      const std::size_t slot = lead_slot(layout.lead_order.at(static_cast<std::size_t>(r * layout.cols + c)));
      const auto begin = static_cast<std::size_t>(std::lround(c * layout.segment_s * target_fs));
      const auto end = std::min(
          total, static_cast<std::size_t>(std::lround((c + 1) * layout.segment_s * target_fs)));
      for (std::size_t i = begin; i < end && i - begin < p->samples.size(); ++i) {
        rec.signals.samples[slot][i] = p->samples[i - begin];
        rec.coverage[slot][i] = 1;
      }
    }
  }

  if (const PanelSignal* p = find(layout.rows, 0, true)) {
    const std::size_t slot = lead_slot(layout.rhythm_lead);
    const std::size_t end = std::min(total, p->samples.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (rec.coverage[slot][i]) continue;
      rec.signals.samples[slot][i] = p->samples[i];
      rec.coverage[slot][i] = 1;
    }
  }
  rec.signals.validate();
  return rec;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> coverage_intervals(
    const CoverageMap& coverage) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out(coverage.size());
  for (std::size_t l = 0; l < coverage.size(); ++l) {
    const auto& c = coverage[l];
    std::size_t i = 0;
    while (i < c.size()) {
      if (!c[i]) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < c.size() && c[i]) ++i;
      out[l].emplace_back(start, i);
    }
  }
  return out;
}

CoverageMap coverage_from_intervals(
    const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& intervals,
    std::size_t n_samples) {
  CoverageMap out(intervals.size(), std::vector<std::uint8_t>(n_samples, 0));
  for (std::size_t l = 0; l < intervals.size(); ++l) {
    for (const auto& [a, b] : intervals[l]) {
      if (a > b || b > n_samples) throw ValidationError("coverage interval out of range");
      std::fill(out[l].begin() + static_cast<std::ptrdiff_t>(a),
                out[l].begin() + static_cast<std::ptrdiff_t>(b), std::uint8_t{1});
    }
  }
  return out;
}

}  // namespace ecgscan
