#include <cmath>
#include <complex>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ecgscan/digitize.hpp"
#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"
#include "ecgscan/metrics.hpp"
#include "ecgscan/paper_render.hpp"
#include "ecgscan/synth.hpp"

using namespace ecgscan;

namespace {

SignalSet from_function(double fs, double (*f)(double)) {
  SignalSet s;
  s.sampling_hz = fs;
  for (auto lead : kStandardLeads) {
    s.lead_names.emplace_back(lead);
    std::vector<double> v(static_cast<std::size_t>(10 * fs));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(static_cast<double>(i) / fs);
    s.samples.push_back(std::move(v));
  }
  return s;
}

DigitizeResult roundtrip(const SignalSet& s, double dpi) {
  PaperLayout layout;
  layout.dpi = dpi;
  DigitizeOptions opt;
  opt.layout = layout;
  return digitize(render(s, layout), opt);
}

SignalSet scaled(SignalSet s, double a) {
  for (auto& lead : s.samples) {
    for (auto& v : lead) v *= a;
  }
  return s;
}

}  // namespace

TEST(Digitize, CleanRoundTripFidelity) {
  const SignalSet ref = synth_ecg(500, 10, 65, 11);
  const DigitizeResult r = roundtrip(ref, 300);
  EXPECT_EQ(r.signals.n_leads(), 12u);
  EXPECT_DOUBLE_EQ(r.signals.duration_s(), 10.0);
  EXPECT_NO_THROW(r.signals.validate());
  const MetricsReport m = report(ref, r.signals, &r.coverage);
  int good = 0;
  for (const auto& l : m.leads) good += l.snr_db >= 10.0;
  EXPECT_GE(good, 10);
  for (const auto& l : m.leads) {
    EXPECT_TRUE(std::isfinite(l.snr_db));
    EXPECT_TRUE(std::isfinite(l.ks) && std::isfinite(l.wad) && std::isfinite(l.asci));
  }
  const nlohmann::json j = m;
  EXPECT_EQ(nlohmann::json(j.get<MetricsReport>()).dump(), j.dump());
}

TEST(Digitize, ReportContents) {
  PaperLayout layout;
  layout.dpi = 200;
  const RenderOutput out = render_with_truth(synth_ecg(500, 10, 60, 4), layout);
  DigitizeOptions opt;
  opt.layout = layout;
  const DigitizeResult r = digitize(out.image, opt);
  const auto& rep = r.report;
  EXPECT_EQ(rep["version"], kDigitizeReportVersion);
  EXPECT_EQ(rep["calibration"], "metadata");
  EXPECT_EQ(rep["bands"].size(), 4u);
  EXPECT_EQ(rep["panels"].size(), 13u);
  EXPECT_TRUE(rep["grid_removal"].contains("iterations"));
  EXPECT_NEAR(rep["px_per_mm"].get<double>(), 200 / 25.4, 1e-9);
  for (const auto& p : rep["panels"]) {
    EXPECT_EQ(p["status"], "ok");
    const int row = p["row"].get<int>();
    EXPECT_NEAR(p["baseline_y_px"].get<double>(), out.truth.row_baselines_px[static_cast<std::size_t>(row)], 2.0)
        << p["lead"];
  }
  const CoverageMap cov = coverage_from_json(rep["coverage"], r.signals.lead_names, r.signals.n_samples());
  EXPECT_EQ(cov, r.coverage);
}

TEST(Digitize, RgbInputMatchesGray) {
  PaperLayout layout;
  layout.dpi = 100;
  const RasterImage gray = render(synth_ecg(500, 10, 70, 2), layout);
  DigitizeOptions opt;
  opt.layout = layout;
  EXPECT_EQ(digitize(RgbImage::from_gray(gray), opt).signals.samples, digitize(gray, opt).signals.samples);
}

TEST(Digitize, BlankPage) {
  try {
    digitize(RasterImage::filled(800, 600, 255));
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "row_detect");
    EXPECT_THROW(e.rethrow_cause(), NoSignalError);
    EXPECT_TRUE(e.report().contains("version"));
  }
}

TEST(Digitize, GridEstimatedCalibration) {
  for (double dpi : {200.0, 300.0}) {
    PaperLayout layout;
    layout.dpi = dpi;
    RasterImage img = render(synth_ecg(500, 10, 70, 5), layout);
    img.dpi.reset();
    DigitizeOptions opt;
    opt.layout = layout;
    const DigitizeResult r = digitize(img, opt);
    EXPECT_EQ(r.report["calibration"], "grid-estimated");
    EXPECT_NEAR(r.report["px_per_mm"].get<double>(), dpi / 25.4, 0.02 * dpi / 25.4);
    opt.dpi_override = dpi;
    EXPECT_EQ(digitize(img, opt).report["calibration"], "override");
  }
}

TEST(Digitize, DebugHooks) {
  PaperLayout layout;
  layout.dpi = 100;
  DigitizeOptions opt;
  opt.layout = layout;
  int iterations = 0, overlays = 0;
  opt.debug.on_iteration = [&](int, double, const InkMask&) { ++iterations; };
  opt.debug.on_band_overlay = [&](int, const RgbImage&) { ++overlays; };
  const DigitizeResult r = digitize(render(synth_ecg(500, 10, 70, 1), layout), opt);
  EXPECT_EQ(iterations, r.report["grid_removal"]["iterations"].get<int>());
  EXPECT_EQ(overlays, 4);
}

TEST(DigitizeProperty, ZeroInputFixedPoint) {
  for (double dpi : {100.0, 200.0, 300.0}) {
    const DigitizeResult r = roundtrip(from_function(500, [](double) { return 0.0; }), dpi);
    for (std::size_t l = 0; l < 12; ++l) {
      for (std::size_t i = 0; i < r.signals.n_samples(); ++i) {
        if (r.coverage[l][i]) {
          ASSERT_LE(std::abs(r.signals.samples[l][i]), 0.05) << dpi;
        }
      }
    }
  }
}

TEST(DigitizeProperty, OneHertzTimeBase) {
  const DigitizeResult r =
      roundtrip(from_function(500, [](double t) { return 0.8 * std::sin(2 * M_PI * t); }), 200);
  const auto& ii = r.signals.lead("II");
  const double fs = r.signals.sampling_hz;
  double best_f = 0, best_p = -1;
  for (int k = 1; k < 100; ++k) {
    const double f = k * fs / static_cast<double>(ii.size());
    std::complex<double> acc = 0;
    for (std::size_t n = 0; n < ii.size(); ++n) {
      acc += ii[n] * std::polar(1.0, -2 * M_PI * f * static_cast<double>(n) / fs);
    }
    if (std::norm(acc) > best_p) {
      best_p = std::norm(acc);
      best_f = f;
    }
  }
  EXPECT_NEAR(best_f, 1.0, 0.02);
}

TEST(DigitizeProperty, AmplitudeLinearity) {
  // Base amplitude kept at 0.4 of the synthetic scale so the 2x render stays
  // inside its row.
  const SignalSet base = scaled(synth_ecg(500, 10, 70, 8), 0.4);
  const DigitizeResult d0 = roundtrip(base, 200);
  for (double alpha : {0.5, 1.5, 2.0}) {
    const DigitizeResult d = roundtrip(scaled(base, alpha), 200);
    for (std::size_t l = 0; l < 12; ++l) {
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < d.signals.n_samples(); ++i) {
        if (!d.coverage[l][i] || !d0.coverage[l][i]) continue;
        sxy += d0.signals.samples[l][i] * d.signals.samples[l][i];
        sxx += d0.signals.samples[l][i] * d0.signals.samples[l][i];
      }
      ASSERT_GT(sxx, 0.0);
      EXPECT_NEAR(sxy / sxx, alpha, 0.1 * alpha) << "alpha " << alpha << " lead " << kStandardLeads[l];
    }
  }
}

TEST(CoverageJson, RoundTrip) {
  const std::vector<std::string> leads{"I", "II"};
  CoverageMap cov(2, std::vector<std::uint8_t>(10, 0));
  for (std::size_t i = 2; i < 5; ++i) cov[0][i] = 1;
  for (std::size_t i = 0; i < 10; ++i) cov[1][i] = 1;
  const nlohmann::json j = coverage_to_json(leads, cov);
  EXPECT_EQ(j["I"], nlohmann::json::parse("[[2,5]]"));
  EXPECT_EQ(coverage_from_json(j, leads, 10), cov);
  EXPECT_EQ(coverage_from_json(nlohmann::json::object(), leads, 10)[0], std::vector<std::uint8_t>(10, 0));
}
