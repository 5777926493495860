#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "batch.hpp"
#include "ecgscan/errors.hpp"
#include "ecgscan/png_io.hpp"
#include "ecgscan/synth.hpp"
#include "ecgscan/wfdb_io.hpp"

namespace ecgscan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_dir(const std::string& path, const char* flag) {
  if (path.empty()) throw ValidationError(std::string("missing --") + flag);
  fs::create_directories(path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Outcome {
  std::string name;
  bool ok = false;
  std::string error;
};

int exit_code(const std::vector<Outcome>& outcomes) {
  const bool failed = std::any_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return !o.ok; });
  return failed ? kPartialFailure : kSuccess;
}

template <typename Fn>
Outcome guarded(const std::string& name, Fn&& fn) {
  Outcome o;
  o.name = name;
  try {
    fn();
    o.ok = true;
  } catch (const std::exception& e) {
    o.error = e.what();
    spdlog::error("{}: {}", name, o.error);
  }
  return o;
}

/// CSV files holding signals (first column time_s), skipping summaries.
std::vector<fs::path> signal_csvs(const fs::path& path) {
  std::vector<fs::path> out;
  for (const auto& p : list_inputs(path, ".csv")) {
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    if (first.rfind("time_s", 0) == 0) out.push_back(p);
  }
  return out;
}

/// Records of a corpus directory: headers when present, else CSV files.
std::vector<fs::path> record_inputs(const fs::path& path) {
  auto headers = list_inputs(path, ".hea");
  if (!headers.empty()) return headers;
  return signal_csvs(path);
}

// Finite values as numbers, infinities as "inf" / "-inf", absent as null.
json snr_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

}  // namespace

std::uint64_t record_seed(std::uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ fnv1a(name));
}

std::vector<fs::path> list_inputs(const fs::path& path, std::string_view extension) {
  if (path.empty()) throw ValidationError("missing --input");
  if (!fs::exists(path)) throw ValidationError("input does not exist: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_gen_corpus(const RunConfig& config) {
  require_dir(config.output, "output");
  const fs::path out = config.output;
  const auto n = static_cast<std::size_t>(config.count);

  struct Made {
    Outcome outcome;
    json entry;
  };
  const auto made = run_batch<Made>(n, config.workers, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "rec_%04zu", i);
    Made m;
    m.outcome = guarded(name, [&] {
      const std::uint64_t seed = record_seed(config.seed, name);
      std::mt19937_64 rng(seed);
      const double hr = std::uniform_real_distribution<double>(config.hr_min, config.hr_max)(rng);
      const SignalSet s = synth_ecg(config.fs, config.duration_s, hr, seed);
      save_record(s, config.gain, out / (std::string(name) + ".hea"));
      save_csv(s, out / (std::string(name) + ".csv"));
      m.entry = {{"name", name},
                 {"seed", seed},
                 {"heart_rate_bpm", hr},
                 {"header", std::string(name) + ".hea"},
                 {"csv", std::string(name) + ".csv"},
                 {"sampling_hz", s.sampling_hz},
                 {"n_samples", s.n_samples()}};
    });
    return m;
  });

  json manifest = {{"version", "ecgscan-corpus-1"},
                   {"seed", config.seed},
                   {"count", config.count},
                   {"duration_s", config.duration_s},
                   {"fs", config.fs},
                   {"hr_min", config.hr_min},
                   {"hr_max", config.hr_max},
                   {"gain", config.gain},
                   {"records", json::array()}};
  std::vector<Outcome> outcomes;
  for (const auto& m : made) {
    outcomes.push_back(m.outcome);
    if (m.outcome.ok) manifest["records"].push_back(m.entry);
  }
  manifest["total"] = manifest["records"].size();
  write_text_file(out / "manifest.json", dump(manifest));
  spdlog::info("gen-corpus: {} records in {}", manifest["total"].get<std::size_t>(), out.string());
  return exit_code(outcomes);
}

int cmd_render(const RunConfig& config) {
  const auto inputs = record_inputs(config.input);
  require_dir(config.output, "output");
  const fs::path out = config.output;
  const PaperLayout layout = config.layout();

  const auto outcomes = run_batch<Outcome>(inputs.size(), config.workers, [&](std::size_t i) {
    const std::string name = inputs[i].stem().string();
    return guarded(name, [&] {
      const SignalSet s = load_signals(inputs[i]);
      const DegradationSpec degrade = config.degradation(record_seed(config.seed, name));
      const RenderOutput r = render_with_truth(s, layout, degrade);
      write_png(out / (name + ".png"), r.image);
      json manifest = render_manifest(layout, degrade, r.truth, r.image.width, r.image.height);
      manifest["source"] = inputs[i].filename().string();
      write_text_file(out / (name + ".render.json"), dump(manifest));
      spdlog::debug("rendered {}", name);
    });
  });
  spdlog::info("render: {} images in {}", outcomes.size(), out.string());
  return exit_code(outcomes);
}

int cmd_digitize(const RunConfig& config) {
  const auto inputs = list_inputs(config.input, ".png");
  require_dir(config.output, "output");
  const fs::path out = config.output;

  struct Digitized {
    Outcome outcome;
    json report;
  };
  const auto results = run_batch<Digitized>(inputs.size(), config.workers, [&](std::size_t i) {
    const std::string name = inputs[i].stem().string();
    Digitized d;
    d.outcome = guarded(name, [&] {
      DigitizeOptions options = config.digitize_options();
      if (config.debug) {
        const fs::path dbg = out / (name + ".debug");
        fs::create_directories(dbg);
        options.debug.on_iteration = [dbg](int iter, double, const InkMask& mask) {
          char file[32];
          std::snprintf(file, sizeof file, "iter_%02d.png", iter);
          write_png(dbg / file, mask_to_image(mask));
        };
        options.debug.on_band_overlay = [dbg](int band, const RgbImage& overlay) {
          write_png(dbg / ("band_" + std::to_string(band) + ".png"), overlay);
        };
      }
      const auto fail = [&](json report, const std::string& stage, const char* what) {
        d.report = std::move(report);
        d.report["source"] = inputs[i].filename().string();
        d.report["error"] = {{"stage", stage}, {"message", what}};
        write_text_file(out / (name + ".report.json"), dump(d.report));
      };
      DecodedImage image;
      try {
        image = read_png(inputs[i]);
      } catch (const std::exception& e) {
        fail({{"version", kDigitizeReportVersion}}, "read", e.what());
        throw;
      }
      DigitizeResult r;
      try {
        r = std::visit([&](const auto& img) { return digitize(img, options); }, image);
      } catch (const StageError& e) {
        fail(e.report(), e.stage(), e.what());
        throw;
      }
      d.report = r.report;
      d.report["source"] = inputs[i].filename().string();
      save_csv(r.signals, out / (name + ".csv"));
      save_record(r.signals, kPtbGain, out / (name + ".hea"));
      write_text_file(out / (name + ".report.json"), dump(d.report));
      spdlog::debug("digitized {}", name);
    });
    return d;
  });

  std::ostringstream summary;
  summary << "record,status,calibration,px_per_mm,iterations,final_threshold,bands,warnings,error\n";
  std::vector<Outcome> outcomes;
  for (const auto& d : results) {
    outcomes.push_back(d.outcome);
    const json r = d.report.is_object() ? d.report : json::object();
    const auto num = [&](const json& v) { return v.is_number() ? format_number(v.get<double>()) : ""; };
    summary << csv_field(d.outcome.name) << ',' << (d.outcome.ok ? "ok" : "failed") << ','
            << csv_field(r.value("calibration", "")) << ',' << num(r.value("px_per_mm", json()))
            << ',';
    if (r.contains("grid_removal")) {
      summary << r["grid_removal"]["iterations"].get<int>() << ','
              << num(r["grid_removal"]["final_threshold"]);
    } else {
      summary << ',';
    }
    summary << ',' << (r.contains("bands") ? r["bands"].size() : 0) << ','
            << (r.contains("warnings") ? r["warnings"].size() : 0) << ',' << csv_field(d.outcome.error)
            << '\n';
  }
  write_text_file(out / "digitize_summary.csv", summary.str());
  spdlog::info("digitize: {} images, {} failed", outcomes.size(),
               std::count_if(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return !o.ok; }));
  return exit_code(outcomes);
}

int cmd_evaluate(const RunConfig& config) {
  const auto inputs = signal_csvs(config.input);
  if (config.reference.empty()) throw ValidationError("missing --reference");
  if (!fs::exists(config.reference)) throw ValidationError("reference does not exist: " + config.reference);
  require_dir(config.output, "output");
  const fs::path out = config.output;
  const fs::path ref_dir = fs::is_directory(config.reference) ? fs::path(config.reference)
                                                               : fs::path(config.reference).parent_path();
  const MetricsOptions options = config.metrics_options();

  struct Scored {
    Outcome outcome;
    std::optional<MetricsReport> report;
  };
  const auto results = run_batch<Scored>(inputs.size(), config.workers, [&](std::size_t i) {
    const std::string name = inputs[i].stem().string();
    Scored s;
    s.outcome = guarded(name, [&] {
      fs::path ref_path = ref_dir / (name + ".hea");
      if (!fs::is_directory(config.reference)) ref_path = config.reference;
      if (!fs::exists(ref_path)) ref_path = ref_dir / (name + ".csv");
      if (!fs::exists(ref_path)) throw ValidationError("no reference record for " + name);
      const SignalSet ref = load_signals(ref_path);
      const SignalSet est = load_csv(inputs[i]);

      std::vector<std::string> a = ref.lead_names;
      std::vector<std::string> b = est.lead_names;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) throw ValidationError("lead sets differ between reference and estimate");

      std::optional<CoverageMap> coverage;
      const fs::path report_path = inputs[i].parent_path() / (name + ".report.json");
      if (options.use_coverage && fs::exists(report_path)) {
        const json rep = json::parse(read_text_file(report_path));
        if (rep.contains("coverage")) {
          coverage = coverage_from_json(rep["coverage"], est.lead_names, est.n_samples());
        }
      }
      s.report = report(ref, est, coverage ? &*coverage : nullptr, options);
      json j = *s.report;
      j["record"] = name;
      write_text_file(out / (name + ".metrics.json"), dump(j));
    });
    return s;
  });

  std::ostringstream csv;
  csv << MetricsReport::csv_header() << ",status,error\n";
  json summary = {{"version", kMetricsVersion}, {"options", options}, {"records", json::array()}};
  std::vector<Outcome> outcomes;
  std::vector<double> record_snr;
  double ks = 0, wad_sum = 0, asci_sum = 0;
  std::size_t scored = 0;
  for (const auto& s : results) {
    outcomes.push_back(s.outcome);
    if (s.report) {
      csv << s.report->csv_row(csv_field(s.outcome.name)) << ",ok,\n";
      if (s.report->snr.mean_db) record_snr.push_back(*s.report->snr.mean_db);
      ks += s.report->ks_mean;
      wad_sum += s.report->wad_mean;
      asci_sum += s.report->asci_mean;
      ++scored;
      summary["records"].push_back({{"record", s.outcome.name},
                                    {"status", "ok"},
                                    {"snr_mean_db", snr_json(s.report->snr.mean_db)},
                                    {"ks_mean", s.report->ks_mean},
                                    {"wad_mean", s.report->wad_mean},
                                    {"asci_mean", s.report->asci_mean}});
    } else {
      csv << csv_field(s.outcome.name) << ",,,,,,,,failed," << csv_field(s.outcome.error) << '\n';
      summary["records"].push_back(
          {{"record", s.outcome.name}, {"status", "failed"}, {"error", s.outcome.error}});
    }
  }
  json agg = {{"records", outcomes.size()}, {"scored", scored}, {"failed", outcomes.size() - scored}};
  if (!record_snr.empty()) {
    const SnrAggregates a = snr_aggregates(record_snr);
    agg["snr_mean_db"] = snr_json(a.mean_db);
    agg["snr_median_db"] = snr_json(a.median_db);
  }
  if (scored > 0) {
    agg["ks_mean"] = ks / scored;
    agg["wad_mean"] = wad_sum / scored;
    agg["asci_mean"] = asci_sum / scored;
  }
  summary["aggregates"] = agg;
  write_text_file(out / "evaluation_summary.csv", csv.str());
  write_text_file(out / "evaluation_summary.json", dump(summary));
  spdlog::info("evaluate: {} records, {} scored", outcomes.size(), scored);
  return exit_code(outcomes);
}

int cmd_roundtrip(const RunConfig& config) {
  if (config.output.empty()) throw ValidationError("missing --output");
  const fs::path out = config.output;
  RunConfig step = config;

  int worst = kSuccess;
  const auto note = [&](int code) { worst = std::max(worst, code); };

  fs::path corpus = out / "corpus";
  if (config.input.empty()) {
    step.output = corpus.string();
    note(cmd_gen_corpus(step));
  } else {
    corpus = config.input;
  }
  step.input = corpus.string();
  step.output = (out / "images").string();
  note(cmd_render(step));
  step.input = (out / "images").string();
  step.output = (out / "digitized").string();
  note(cmd_digitize(step));
  step.input = (out / "digitized").string();
  step.reference = corpus.string();
  step.output = (out / "evaluation").string();
  note(cmd_evaluate(step));

  const json eval = json::parse(read_text_file(out / "evaluation" / "evaluation_summary.json"));
  const auto records = record_inputs(corpus);
  json summary = {{"version", "ecgscan-roundtrip-1"},
                  {"config", config},
                  {"records", records.size()},
                  {"evaluation", eval["aggregates"]},
                  {"per_record", eval["records"]}};
  summary["config"].erase("workers");
  summary["config"].erase("verbose");
  summary["config"].erase("output");
  summary["config"].erase("input");
  summary["failed"] = records.size() - eval["aggregates"]["scored"].get<std::size_t>();
  write_text_file(out / "summary.json", dump(summary));

  std::ostringstream table;
  table << std::left << std::setw(14) << "record" << std::setw(8) << "status" << std::right
        << std::setw(12) << "snr_mean" << std::setw(10) << "ks" << std::setw(10) << "wad"
        << std::setw(10) << "asci" << '\n';
  const auto cell = [](const json& v) {
    std::ostringstream s;
    if (v.is_number()) {
      s << std::fixed << std::setprecision(3) << v.get<double>();
    } else if (v.is_string()) {
      const std::string str = v.get<std::string>();
      try {
        s << std::fixed << std::setprecision(3) << std::stod(str);
      } catch (const std::exception&) {
        s << str;
      }
    } else {
      s << "-";
    }
    return s.str();
  };
  for (const auto& r : eval["records"]) {
    table << std::left << std::setw(14) << r["record"].get<std::string>() << std::setw(8)
          << r["status"].get<std::string>() << std::right << std::setw(12)
          << cell(r.value("snr_mean_db", json())) << std::setw(10) << cell(r.value("ks_mean", json()))
          << std::setw(10) << cell(r.value("wad_mean", json())) << std::setw(10)
          << cell(r.value("asci_mean", json())) << '\n';
  }
  const json& agg = eval["aggregates"];
  table << std::left << std::setw(14) << "ALL" << std::setw(8)
        << (std::to_string(agg["scored"].get<std::size_t>()) + "/" + std::to_string(records.size()))
        << std::right << std::setw(12) << cell(agg.value("snr_mean_db", json())) << std::setw(10)
        << cell(agg.value("ks_mean", json())) << std::setw(10) << cell(agg.value("wad_mean", json()))
        << std::setw(10) << cell(agg.value("asci_mean", json())) << '\n';
  table << "median record SNR: " << cell(agg.value("snr_median_db", json())) << " dB\n";
  std::cout << table.str();
  return worst;
}

}  // namespace ecgscan::cli
