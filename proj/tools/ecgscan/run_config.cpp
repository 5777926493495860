#include "run_config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"

namespace ecgscan::cli {

namespace {

using Setter = std::function<void(const nlohmann::json&, RunConfig&)>;

template <typename T>
Setter set(T RunConfig::*member) {
  return [member](const nlohmann::json& v, RunConfig& c) { c.*member = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", set(&RunConfig::seed)},
      {"workers", set(&RunConfig::workers)},
      {"verbose", set(&RunConfig::verbose)},
      {"input", set(&RunConfig::input)},
      {"output", set(&RunConfig::output)},
      {"reference", set(&RunConfig::reference)},
      {"count", set(&RunConfig::count)},
      {"duration_s", set(&RunConfig::duration_s)},
      {"fs", set(&RunConfig::fs)},
      {"hr_min", set(&RunConfig::hr_min)},
      {"hr_max", set(&RunConfig::hr_max)},
      {"gain", set(&RunConfig::gain)},
      {"dpi",
       [](const nlohmann::json& v, RunConfig& c) {
         if (v.is_null()) {
           c.dpi.reset();
         } else {
           c.dpi = v.get<double>();
         }
       }},
      {"mm_per_s", set(&RunConfig::mm_per_s)},
      {"mm_per_mv", set(&RunConfig::mm_per_mv)},
      {"margin_mm", set(&RunConfig::margin_mm)},
      {"row_height_mm", set(&RunConfig::row_height_mm)},
      {"rhythm_lead", set(&RunConfig::rhythm_lead)},
      {"labels", set(&RunConfig::labels)},
      {"calibration_pulse", set(&RunConfig::calibration_pulse)},
      {"noise_sigma", set(&RunConfig::noise_sigma)},
      {"rotation_deg", set(&RunConfig::rotation_deg)},
      {"trace_thickness_px", set(&RunConfig::trace_thickness_px)},
      {"grid_intensity", set(&RunConfig::grid_intensity)},
      {"trace_intensity", set(&RunConfig::trace_intensity)},
      {"row_detector", set(&RunConfig::row_detector)},
      {"target_fs", set(&RunConfig::target_fs)},
      {"debug", set(&RunConfig::debug)},
      {"align", set(&RunConfig::align)},
      {"max_lag_s", set(&RunConfig::max_lag_s)},
      {"asci_beta", set(&RunConfig::asci_beta)},
      {"use_coverage", set(&RunConfig::use_coverage)},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  const auto fail = [](const std::string& what) { throw ValidationError("config: " + what); };
  if (workers < 0) fail("workers must be >= 0");
  if (count < 0) fail("count must be >= 0");
  if (!(duration_s > 0.0)) fail("duration_s must be positive");
  if (!(fs >= 100.0)) fail("fs must be >= 100");
  if (!(hr_min >= 30.0 && hr_max <= 200.0 && hr_min <= hr_max)) {
    fail("heart rate range must satisfy 30 <= hr_min <= hr_max <= 200");
  }
  if (!(gain > 0.0)) fail("gain must be positive");
  if (dpi && !(*dpi > 0.0)) fail("dpi must be positive");
  if (!(target_fs > 0.0)) fail("target_fs must be positive");
  if (!(max_lag_s >= 0.0)) fail("max_lag_s must be >= 0");
  if (!(asci_beta > 0.0 && asci_beta < 1.0)) fail("asci_beta must lie in (0, 1)");
  if (!is_standard_lead(rhythm_lead)) fail("rhythm_lead is not a standard lead");
  layout().validate();
  degradation(0).validate();
}

PaperLayout RunConfig::layout() const {
  PaperLayout l;
  l.dpi = dpi.value_or(kDefaultRenderDpi);
  l.mm_per_s = mm_per_s;
  l.mm_per_mV = mm_per_mv;
  l.margin_mm = margin_mm;
  l.row_height_mm = row_height_mm;
  l.rhythm_lead = canonical_lead_name(rhythm_lead).value_or(rhythm_lead);
  l.draw_labels = labels;
  l.draw_calibration_pulse = calibration_pulse;
  return l;
}

DegradationSpec RunConfig::degradation(std::uint64_t record_seed) const {
  DegradationSpec d;
  d.gaussian_noise_sigma = noise_sigma;
  d.rotation_deg = rotation_deg;
  d.trace_thickness_px = trace_thickness_px;
  d.grid_intensity = grid_intensity;
  d.trace_intensity = trace_intensity;
  d.seed = record_seed;
  return d;
}

DigitizeOptions RunConfig::digitize_options() const {
  DigitizeOptions o;
  o.layout = layout();
  o.dpi_override = dpi;
  o.target_fs = target_fs;
  o.row_detector = row_detector;
  return o;
}

MetricsOptions RunConfig::metrics_options() const {
  MetricsOptions o;
  o.align = align;
  o.max_lag_s = max_lag_s;
  o.asci_beta = asci_beta;
  o.use_coverage = use_coverage;
  return o;
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"seed", c.seed},
       {"workers", c.workers},
       {"verbose", c.verbose},
       {"input", c.input},
       {"output", c.output},
       {"reference", c.reference},
       {"count", c.count},
       {"duration_s", c.duration_s},
       {"fs", c.fs},
       {"hr_min", c.hr_min},
       {"hr_max", c.hr_max},
       {"gain", c.gain},
       {"dpi", c.dpi ? nlohmann::json(*c.dpi) : nlohmann::json(nullptr)},
       {"mm_per_s", c.mm_per_s},
       {"mm_per_mv", c.mm_per_mv},
       {"margin_mm", c.margin_mm},
       {"row_height_mm", c.row_height_mm},
       {"rhythm_lead", c.rhythm_lead},
       {"labels", c.labels},
       {"calibration_pulse", c.calibration_pulse},
       {"noise_sigma", c.noise_sigma},
       {"rotation_deg", c.rotation_deg},
       {"trace_thickness_px", c.trace_thickness_px},
       {"grid_intensity", c.grid_intensity},
       {"trace_intensity", c.trace_intensity},
       {"row_detector", c.row_detector},
       {"target_fs", c.target_fs},
       {"debug", c.debug},
       {"align", c.align},
       {"max_lag_s", c.max_lag_s},
       {"asci_beta", c.asci_beta},
       {"use_coverage", c.use_coverage}};
}

void merge_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ValidationError("config: unknown key '" + key + "'");
    try {
      it->second(value, c);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  merge_json(j, c);
  return c;
}

}  // namespace ecgscan::cli
