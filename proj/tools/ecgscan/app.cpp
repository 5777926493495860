#include "app.hpp"

#include <algorithm>
#include <functional>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "ecgscan/errors.hpp"
#include "ecgscan/wfdb_io.hpp"

namespace ecgscan::cli {

namespace {

std::string kebab(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

/// Binds one flag per config key to a scratch RunConfig and remembers how to
/// copy given flags over the effective config.
class FlagTable {
 public:
  explicit FlagTable(CLI::App& app) : app_(app) {}

  template <typename T>
  void option(const std::string& key, T RunConfig::*member, const std::string& help) {
    CLI::Option* opt = app_.add_option(kebab(key), flags_.*member, help);
    apply_.push_back([opt, member, this](RunConfig& c) {
      if (opt->count() > 0) c.*member = flags_.*member;
    });
  }

  void flag(const std::string& key, bool RunConfig::*member, const std::string& help) {
    const std::string name = kebab(key);
    CLI::Option* opt = app_.add_flag(name + ",!--no-" + name.substr(2), flags_.*member, help);
    apply_.push_back([opt, member, this](RunConfig& c) {
      if (opt->count() > 0) c.*member = flags_.*member;
    });
  }

  void dpi(const std::string& help) {
    CLI::Option* opt = app_.add_option("--dpi", dpi_, help);
    apply_.push_back([opt, this](RunConfig& c) {
      if (opt->count() > 0) c.dpi = dpi_;
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& fn : apply_) fn(c);
  }

 private:
  CLI::App& app_;
  RunConfig flags_;
  double dpi_ = 0.0;
  std::vector<std::function<void(RunConfig&)>> apply_;
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Render, digitize and score 12-lead paper ECGs", "ecgscan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ecgscan 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  FlagTable t(app);
  t.option("seed", &RunConfig::seed, "Master seed");
  t.option("workers", &RunConfig::workers, "Worker threads (0 = hardware concurrency)");
  t.flag("verbose", &RunConfig::verbose, "Debug logging");
  t.option("input", &RunConfig::input, "Input file or directory");
  t.option("output", &RunConfig::output, "Output directory");
  t.option("reference", &RunConfig::reference, "Reference record or directory (evaluate)");
  t.option("count", &RunConfig::count, "Records to generate");
  t.option("duration_s", &RunConfig::duration_s, "Record length, s");
  t.option("fs", &RunConfig::fs, "Corpus sampling rate, Hz");
  t.option("hr_min", &RunConfig::hr_min, "Lowest heart rate, bpm");
  t.option("hr_max", &RunConfig::hr_max, "Highest heart rate, bpm");
  t.option("gain", &RunConfig::gain, "WFDB gain, ADC units per mV");
  t.dpi("Render resolution; when digitizing, overrides image metadata");
  t.option("mm_per_s", &RunConfig::mm_per_s, "Paper speed, mm/s");
  t.option("mm_per_mv", &RunConfig::mm_per_mv, "Amplitude scale, mm/mV");
  t.option("margin_mm", &RunConfig::margin_mm, "Page margin, mm");
  t.option("row_height_mm", &RunConfig::row_height_mm, "Height of each strip, mm");
  t.option("rhythm_lead", &RunConfig::rhythm_lead, "Lead of the rhythm strip");
  t.flag("labels", &RunConfig::labels, "Print lead labels");
  t.flag("calibration_pulse", &RunConfig::calibration_pulse, "Print 1 mV calibration pulses");
  t.option("noise_sigma", &RunConfig::noise_sigma, "Gaussian pixel noise, intensity units");
  t.option("rotation_deg", &RunConfig::rotation_deg, "Page rotation, degrees");
  t.option("trace_thickness_px", &RunConfig::trace_thickness_px, "Trace pen width, px");
  t.option("grid_intensity", &RunConfig::grid_intensity, "Grid gray level");
  t.option("trace_intensity", &RunConfig::trace_intensity, "Trace gray level");
  t.option("row_detector", &RunConfig::row_detector, "Row detector name");
  t.option("target_fs", &RunConfig::target_fs, "Digitized sampling rate, Hz");
  t.flag("debug", &RunConfig::debug, "Write per-iteration masks and trace overlays");
  t.flag("align", &RunConfig::align, "Lag-align estimates before scoring");
  t.option("max_lag_s", &RunConfig::max_lag_s, "Alignment search range, s");
  t.option("asci_beta", &RunConfig::asci_beta, "ASCI tolerance fraction");
  t.flag("use_coverage", &RunConfig::use_coverage, "Score only observed samples");

  using Command = int (*)(const RunConfig&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands = {
      {"gen-corpus", {"Write a seeded synthetic record corpus", &cmd_gen_corpus}},
      {"render", {"Render records to paper-ECG PNGs", &cmd_render}},
      {"digitize", {"Digitize PNG images into records", &cmd_digitize}},
      {"evaluate", {"Score digitized records against references", &cmd_evaluate}},
      {"roundtrip", {"gen-corpus, render, digitize and evaluate in one go", &cmd_roundtrip}},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    sub->fallthrough();
    subs.emplace_back(sub, info.second);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunConfig config;
  try {
    if (!config_path.empty()) merge_json(nlohmann::json::parse(read_text_file(config_path)), config);
    t.apply(config);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "ecgscan: " << e.what() << '\n';
    return kFatal;
  }

  auto logger = spdlog::stderr_color_mt("ecgscan");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(config.verbose ? spdlog::level::debug : spdlog::level::info);

  int code = kFatal;
  try {
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) code = fn(config);
    }
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    code = kFatal;
  }
  spdlog::drop("ecgscan");
  return code;
}

}  // namespace ecgscan::cli
