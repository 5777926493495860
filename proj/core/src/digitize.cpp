#include "ecgscan/digitize.hpp"

#include <algorithm>
#include <cmath>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

using nlohmann::json;

template <typename Fn>
auto run_stage(const char* stage, const json& report, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, report, std::current_exception(), e.what());
  }
}

struct Region {
  RowBand band;   // detected band
  RowBand reach;  // extraction region
};

// Extends each band to the midpoints between neighbouring band centres so
// that sparse peaks just outside the projection band stay reachable.
std::vector<Region> extraction_regions(const std::vector<RowBand>& bands, int height) {
  std::vector<Region> out;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    RowBand reach = bands[i];
    reach.y_top = i == 0 ? 0
                         : static_cast<int>(std::ceil(0.5 * (bands[i - 1].center() + bands[i].center())));
    reach.y_bottom = i + 1 == bands.size()
                         ? height
                         : static_cast<int>(std::ceil(0.5 * (bands[i].center() + bands[i + 1].center())));
    reach.y_top = std::min(reach.y_top, bands[i].y_top);
    reach.y_bottom = std::max(reach.y_bottom, bands[i].y_bottom);
    out.push_back({bands[i], reach});
  }
  return out;
}

json band_json(const RowBand& b) {
  return {{"index", b.index}, {"y_top", b.y_top}, {"y_bottom", b.y_bottom}, {"center", b.center()}};
}

}  // namespace

std::optional<GridEstimate> estimate_grid_pitch(const RasterImage& gray,
                                                const GridDetectConfig& config) {
  const Histogram hist = histogram(gray);
  std::optional<GridEstimate> best;
  const auto consider = [&](int t) {
    GridEstimate g = detect_grid(binarize(gray, inclusive_cutoff(t)), config);
    if (!g.period_px) return;
    if (!best || g.confidence > best->confidence) best = std::move(g);
  };
  int t0 = 0;
  try {
    t0 = otsu_threshold(hist);
  } catch (const DegenerateHistogramError&) {
    return std::nullopt;
  }
  consider(t0);
  // Light grids sit between the trace and the paper; a second split of the
  // bright class separates them from the paper.
  Histogram upper{};
  for (int v = t0 + 1; v < 256; ++v) upper[static_cast<std::size_t>(v)] = hist[static_cast<std::size_t>(v)];
  try {
    consider(otsu_threshold(upper));
  } catch (const DegenerateHistogramError&) {
  }
  return best;
}

DigitizeResult digitize(const RgbImage& rgb, const DigitizeOptions& options) {
  RasterImage gray = run_stage("grayscale", json::object(), [&] { return to_grayscale(rgb); });
  return digitize(gray, options);
}

DigitizeResult digitize(const RasterImage& gray, const DigitizeOptions& options) {
  json report;
  report["version"] = kDigitizeReportVersion;
  report["image"] = {{"width", gray.width}, {"height", gray.height}};
  if (gray.dpi) report["image"]["dpi"] = *gray.dpi;
  report["warnings"] = json::array();
  auto& warnings = report["warnings"];

  const PaperLayout& layout = options.layout;
  run_stage("input", report, [&] {
    layout.validate();
    if (gray.empty() || gray.pixels.size() != static_cast<std::size_t>(gray.width) * gray.height) {
      throw ValidationError("image is empty or inconsistent");
    }
    if (!(options.target_fs > 0.0)) throw ValidationError("target_fs must be positive");
    return 0;
  });

  GridRemovalConfig grid_cfg = options.grid;
  if (options.debug.on_iteration) grid_cfg.on_iteration = options.debug.on_iteration;
  GridRemovalResult removal = run_stage("remove_grid", report, [&] {
    try {
      return remove_grid(gray, grid_cfg);
    } catch (const DegenerateHistogramError&) {
      // A uniform page has no ink; row detection reports it.
      GridRemovalResult empty;
      empty.mask = InkMask::empty_like(gray.width, gray.height);
      return empty;
    }
  });
  report["grid_removal"] = {{"initial_threshold", removal.initial_threshold},
                            {"final_threshold", removal.final_threshold},
                            {"iterations", removal.iterations},
                            {"grid_residual", removal.grid_residual},
                            {"grid", removal.grid}};
  if (removal.grid_residual) warnings.push_back("grid still detected after threshold reduction");

  const int expected = layout.rows + 1;
  RowDetection rows = run_stage("row_detect", report, [&] {
    return make_row_detector(options.row_detector, options.rows)->detect(removal.mask, expected);
  });
  report["row_detector"] = options.row_detector;
  report["bands"] = json::array();
  for (const auto& b : rows.bands) report["bands"].push_back(band_json(b));
  if (rows.short_count) {
    warnings.push_back("found " + std::to_string(rows.bands.size()) + " of " +
                       std::to_string(expected) + " rows");
  }

  const double px_per_mm = run_stage("calibration", report, [&] {
    if (options.dpi_override) {
      if (!(*options.dpi_override > 0.0)) throw ValidationError("dpi override must be positive");
      report["calibration"] = "override";
      return *options.dpi_override / 25.4;
    }
    if (gray.dpi && *gray.dpi > 0.0) {
      report["calibration"] = "metadata";
      return *gray.dpi / 25.4;
    }
    const auto pitch = estimate_grid_pitch(gray, grid_cfg.detect);
    if (!pitch) throw ReconstructionError("no dpi metadata and no grid to calibrate from");
    report["calibration"] = "grid-estimated";
    report["calibration_grid"] = *pitch;
    return *pitch->period_px / layout.small_grid_mm;
  });
  report["px_per_mm"] = px_per_mm;
  report["mm_per_s"] = layout.mm_per_s;
  report["mm_per_mV"] = layout.mm_per_mV;
  report["target_fs"] = options.target_fs;

  std::vector<PanelSignal> panel_signals;
  report["panels"] = json::array();
  const auto regions = extraction_regions(rows.bands, gray.height);
  run_stage("trace_extract", report, [&] {
    for (std::size_t b = 0; b < regions.size(); ++b) {
      RowBand reach = regions[b].reach;
      // Bands map to layout rows in top-to-bottom order; a short count
      // leaves the lowest rows unassigned.
      reach.index = static_cast<int>(b);
      const auto ranges = segment_panels(reach, layout, gray.width, px_per_mm);
      ColumnNodes band_nodes;
      TracePath band_path;
      band_nodes.first_col = 0;
      band_nodes.columns.resize(static_cast<std::size_t>(gray.width));
      band_path.band = reach;
      for (const auto& range : ranges) {
        json entry = {{"lead", range.lead},       {"row", range.row},
                      {"col", range.col},         {"rhythm", range.rhythm},
                      {"col_begin", range.col_begin}, {"col_end", range.col_end}};
        const ColumnNodes nodes =
            find_nodes(removal.mask, reach, range.col_begin, range.col_end, options.trace);
        entry["nodes"] = nodes.node_count();
        if (nodes.node_count() == 0 || range.width() < 2) {
          entry["status"] = "empty";
          report["panels"].push_back(entry);
          warnings.push_back("no trace in panel " + range.lead);
          continue;
        }
        const TracePath path = least_cost_path(nodes, reach, options.trace);
        const std::vector<double> dense = fill_gaps(path, range.col_begin, range.col_end);
        CalibrationParams calib;
        calib.px_per_mm = px_per_mm;
        calib.mm_per_s = layout.mm_per_s;
        calib.mm_per_mV = layout.mm_per_mV;
        calib.target_fs = options.target_fs;
        calib.baseline_y_px = estimate_baseline(dense);
        calib.pixel_phase_px = range.col_begin + 0.5 - range.x_origin_px;
        panel_signals.push_back({range.row, range.col, range.rhythm, path_to_signal(dense, calib)});

        entry["status"] = "ok";
        entry["path_cost"] = path.total_cost;
        entry["baseline_y_px"] = calib.baseline_y_px;
        report["panels"].push_back(entry);

        if (options.debug.on_band_overlay) {
          for (std::size_t i = 0; i < nodes.columns.size(); ++i) {
            band_nodes.columns[static_cast<std::size_t>(nodes.first_col) + i] = nodes.columns[i];
          }
          band_path.entries.insert(band_path.entries.end(), path.entries.begin(),
                                   path.entries.end());
        }
      }
      if (options.debug.on_band_overlay) {
        options.debug.on_band_overlay(static_cast<int>(b),
                                      trace_overlay(removal.mask, reach, band_nodes, band_path));
      }
    }
    return 0;
  });

  AssembledRecord record = run_stage("assemble", report, [&] {
    return assemble_record(panel_signals, layout, options.target_fs);
  });
  report["coverage"] = coverage_to_json(record.signals.lead_names, record.coverage);
  return {std::move(record.signals), std::move(record.coverage), std::move(report)};
}

nlohmann::json coverage_to_json(const std::vector<std::string>& leads,
                                const CoverageMap& coverage) {
  if (leads.size() != coverage.size()) throw ContractViolation("coverage does not match leads");
  json out = json::object();
  const auto intervals = coverage_intervals(coverage);
  for (std::size_t l = 0; l < leads.size(); ++l) {
    json list = json::array();
    for (const auto& [a, b] : intervals[l]) list.push_back({a, b});
    out[leads[l]] = std::move(list);
  }
  return out;
}

CoverageMap coverage_from_json(const nlohmann::json& j, const std::vector<std::string>& leads,
                               std::size_t n_samples) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> intervals(leads.size());
  for (std::size_t l = 0; l < leads.size(); ++l) {
    const auto it = j.find(leads[l]);
    if (it == j.end()) continue;
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2) throw FormatError("coverage entries must be pairs");
      intervals[l].emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
    }
  }
  return coverage_from_intervals(intervals, n_samples);
}

}  // namespace ecgscan
