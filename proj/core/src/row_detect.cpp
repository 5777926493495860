#include "ecgscan/row_detect.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

struct Run {
  int top;
  int bottom;  // exclusive
  double mass;
  int peak;  // first row of the smoothed maximum
  int peak_end;  // last row of that maximum, for plateaus
};

struct Registry {
  std::mutex mutex;
  std::map<std::string, RowDetectorFactory, std::less<>> factories;

  Registry() {
    factories["projection"] = [](const RowDetectConfig& cfg) {
      return std::make_unique<ProjectionRowDetector>(cfg);
    };
  }
};

Registry& registry() {
  static Registry instance;
  return instance;
}

}  // namespace

RowDetection ProjectionRowDetector::detect(const InkMask& mask, int expected) const {
  if (expected < 1) throw ContractViolation("expected row count must be >= 1");
  const int h = mask.height;
  std::vector<double> profile(static_cast<std::size_t>(std::max(h, 0)), 0.0);
  double total = 0.0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = mask.ink.data() + mask.index(0, y);
    double count = 0.0;
    for (int x = 0; x < mask.width; ++x) count += row[x];
    profile[static_cast<std::size_t>(y)] = count;
    total += count;
  }
  if (total == 0.0) throw NoSignalError("mask has no ink");

  // Centred moving average, zero outside the image.
  const int window = std::max(1, config_.smoothing_px);
  const int before = (window - 1) / 2;
  std::vector<double> smooth(profile.size(), 0.0);
  std::vector<double> prefix(profile.size() + 1, 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) prefix[i + 1] = prefix[i] + profile[i];
  for (int y = 0; y < h; ++y) {
    const int lo = std::max(0, y - before);
    const int hi = std::min(h, y - before + window);
    smooth[static_cast<std::size_t>(y)] =
        (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) / window;
  }
  // Speckle left by partial grid removal lifts every row evenly; the median
  // row measures that floor.
  std::vector<double> sorted = smooth;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double floor = sorted[sorted.size() / 2];
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  const double cut = floor + config_.band_fraction * (peak - floor);

  std::vector<Run> runs;
  for (int y = 0; y < h;) {
    if (smooth[static_cast<std::size_t>(y)] < cut) {
      ++y;
      continue;
    }
    Run run{y, y, 0.0, y, y};
    while (y < h && smooth[static_cast<std::size_t>(y)] >= cut) {
      run.mass += std::max(0.0, profile[static_cast<std::size_t>(y)] - floor);
      const double v = smooth[static_cast<std::size_t>(y)];
      const double best = smooth[static_cast<std::size_t>(run.peak)];
      if (v > best) {
        run.peak = run.peak_end = y;
      } else if (v == best && run.peak_end == y - 1) {
        run.peak_end = y;
      }
      ++y;
    }
    run.bottom = y;
    if (!runs.empty() && run.top - runs.back().bottom < config_.merge_gap_px) {
      for (int yy = runs.back().bottom; yy < run.top; ++yy) {
        runs.back().mass += std::max(0.0, profile[static_cast<std::size_t>(yy)] - floor);
      }
      runs.back().bottom = run.bottom;
      runs.back().mass += run.mass;
      if (smooth[static_cast<std::size_t>(run.peak)] > smooth[static_cast<std::size_t>(runs.back().peak)]) {
        runs.back().peak = run.peak;
        runs.back().peak_end = run.peak_end;
      }
    } else {
      runs.push_back(run);
    }
  }

  RowDetection out;
  if (static_cast<int>(runs.size()) > expected) {
    std::stable_sort(runs.begin(), runs.end(),
                     [](const Run& a, const Run& b) { return a.mass > b.mass; });
    runs.resize(static_cast<std::size_t>(expected));
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.top < b.top; });
  }
  out.short_count = static_cast<int>(runs.size()) < expected;

  // Bands are centred on the profile peak, which tracks the isoelectric line
  // even when the deflections above and below it are unequal. A flat-topped
  // peak counts from its middle row.
  for (auto& run : runs) run.peak = (run.peak + run.peak_end) / 2;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& run = runs[i];
    int half = std::max(run.peak - run.top, run.bottom - 1 - run.peak) + config_.pad_px;
    // Neither side may reach the midpoint to a neighbouring peak, so
    // adjacent bands never share a row.
    if (i > 0) half = std::min(half, (run.peak - runs[i - 1].peak - 1) / 2);
    if (i + 1 < runs.size()) half = std::min(half, (runs[i + 1].peak - run.peak - 1) / 2);
    RowBand band;
    band.y_top = std::clamp(run.peak - half, 0, h);
    band.y_bottom = std::clamp(run.peak + half + 1, 0, h);
    band.index = static_cast<int>(i);
    out.bands.push_back(band);
  }
  return out;
}

void register_row_detector(const std::string& name, RowDetectorFactory factory) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  reg.factories[name] = std::move(factory);
}

std::unique_ptr<RowDetector> make_row_detector(std::string_view name,
                                               const RowDetectConfig& config) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  auto it = reg.factories.find(name);
  if (it == reg.factories.end()) {
    throw ValidationError("unknown row detector '" + std::string(name) + "'");
  }
  return it->second(config);
}

std::vector<std::string> row_detector_names() {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  std::vector<std::string> names;
  for (const auto& [name, factory] : reg.factories) names.push_back(name);
  return names;
}

}  // namespace ecgscan
