#include <cmath>
#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"
#include "ecgscan/paper_render.hpp"
#include "ecgscan/synth.hpp"
#include "quadrature_oracle.hpp"

using namespace ecgscan;

namespace {

SignalSet constant_set(double value, double fs = 500.0, double duration = 10.0) {
  SignalSet s;
  s.sampling_hz = fs;
  const auto n = static_cast<std::size_t>(std::lround(fs * duration));
  for (auto lead : kStandardLeads) {
    s.lead_names.emplace_back(lead);
    s.samples.emplace_back(n, value);
  }
  return s;
}

// Mean (y + 0.5) of trace pixels over the columns of the first segment panel.
double mean_trace_row(const RenderTruth& truth, const PaperLayout& layout, int row) {
  const PanelPlacement* panel = nullptr;
  for (const auto& p : truth.panels) {
    if (p.row == row && (p.rhythm || p.col == 0)) {
      panel = &p;
      break;
    }
  }
  const double ppmm = layout.px_per_mm();
  const int x0 = static_cast<int>(panel->box.x0 * ppmm) + 5;
  const int x1 = static_cast<int>(panel->box.x1 * ppmm) - 5;
  const int y0 = static_cast<int>(panel->box.y0 * ppmm);
  const int y1 = static_cast<int>(panel->box.y1 * ppmm);
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = std::max(0, y0); y < std::min(truth.trace.height, y1); ++y) {
    for (int x = x0; x < x1; ++x) {
      if (truth.trace.at(x, y)) {
        sum += y + 0.5;
        ++n;
      }
    }
  }
  return n ? sum / static_cast<double>(n) : NAN;
}

}  // namespace

TEST(PaperLayout, DefaultsValidate) {
  PaperLayout layout;
  EXPECT_NO_THROW(layout.validate());
  EXPECT_DOUBLE_EQ(mm_to_px(25.4, 100.0), 100.0);
  layout.rows = 0;
  EXPECT_THROW(layout.validate(), ValidationError);
  layout = PaperLayout{};
  layout.rhythm_lead = "X";
  EXPECT_THROW(layout.validate(), ValidationError);
}

TEST(PaperLayout, JsonRoundTrip) {
  PaperLayout layout;
  layout.dpi = 300;
  layout.rhythm_lead = "V2";
  layout.draw_labels = true;
  const nlohmann::json j = layout;
  const PaperLayout back = j.get<PaperLayout>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(PlanPanels, DefaultAssignments) {
  const auto panels = plan_panels(PaperLayout{});
  ASSERT_EQ(panels.size(), 13u);
  EXPECT_EQ(panels[0].lead, "I");
  EXPECT_DOUBLE_EQ(panels[0].t_begin_s, 0.0);
  EXPECT_DOUBLE_EQ(panels[0].t_end_s, 2.5);
  const auto& rhythm = panels.back();
  EXPECT_TRUE(rhythm.rhythm);
  EXPECT_EQ(rhythm.lead, "II");
  EXPECT_DOUBLE_EQ(rhythm.t_begin_s, 0.0);
  EXPECT_DOUBLE_EQ(rhythm.t_end_s, 10.0);
  const auto& v6 = panels[2 * 4 + 3];
  EXPECT_EQ(v6.lead, "V6");
  EXPECT_EQ(v6.row, 2);
  EXPECT_EQ(v6.col, 3);
  EXPECT_DOUBLE_EQ(v6.t_begin_s, 7.5);
  EXPECT_DOUBLE_EQ(v6.t_end_s, 10.0);
}

TEST(Render, ValidatesInputs) {
  PaperLayout layout;
  SignalSet s = constant_set(0.0);
  s.lead_names.pop_back();
  s.samples.pop_back();
  EXPECT_THROW(render(s, layout), ValidationError);
  EXPECT_THROW(render(constant_set(0.0, 500.0, 4.0), layout), ValidationError);
  DegradationSpec bad;
  bad.rotation_deg = 6;
  EXPECT_THROW(render(constant_set(0.0), layout, bad), ValidationError);
}

TEST(Render, PageSize) {
  PaperLayout layout;
  layout.dpi = 100;
  const RasterImage img = render(constant_set(0.0), layout);
  EXPECT_EQ(img.width, layout.page_width_px());
  EXPECT_EQ(img.height, layout.page_height_px());
  EXPECT_EQ(img.width, static_cast<int>(std::lround(270.0 * 100 / 25.4)));
  ASSERT_TRUE(img.dpi.has_value());
  EXPECT_DOUBLE_EQ(*img.dpi, 100.0);
}

TEST(Render, ZeroSignalSitsOnBaselines) {
  PaperLayout layout;
  const RenderOutput out = render_with_truth(constant_set(0.0), layout);
  ASSERT_EQ(out.truth.row_baselines_px.size(), 4u);
  for (int row = 0; row < 4; ++row) {
    const double baseline = layout.baseline_mm(row) * layout.px_per_mm();
    EXPECT_NEAR(out.truth.row_baselines_px[static_cast<std::size_t>(row)], baseline, 1e-9);
    EXPECT_NEAR(mean_trace_row(out.truth, layout, row), baseline, 1.0) << "row " << row;
  }
}

TEST(Render, ConstantLeadOffset) {
  PaperLayout layout;
  layout.dpi = 254;
  const RenderOutput out = render_with_truth(constant_set(1.0), layout);
  for (int row = 0; row < 4; ++row) {
    const double baseline = out.truth.row_baselines_px[static_cast<std::size_t>(row)];
    EXPECT_NEAR(mean_trace_row(out.truth, layout, row), baseline - 100.0, 1.0);
  }
}

TEST(Render, GeometryPropertyAcrossValues) {
  PaperLayout layout;
  layout.dpi = 200;
  DegradationSpec spec;
  for (double v : {-1.5, -0.4, 0.25, 0.9, 1.7}) {
    const RenderOutput out = render_with_truth(constant_set(v), layout, spec);
    const double baseline = out.truth.row_baselines_px[1];
    const double expected = baseline - v * layout.mm_per_mV * layout.px_per_mm();
    EXPECT_NEAR(mean_trace_row(out.truth, layout, 1), expected, spec.trace_thickness_px / 2.0)
        << "v=" << v;
  }
}

TEST(Render, GridPeriodicity) {
  for (double dpi : {100.0, 200.0, 300.0}) {
    PaperLayout layout;
    layout.dpi = dpi;
    DegradationSpec spec;
    spec.draw_traces = false;
    const RasterImage img = render(constant_set(0.0), layout, spec);
    std::vector<double> density(static_cast<std::size_t>(img.width), 0.0);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) density[static_cast<std::size_t>(x)] += img.at(x, y) < 255;
    }
    const double mean = std::accumulate(density.begin(), density.end(), 0.0) / img.width;
    for (auto& d : density) d -= mean;
    const int expected = static_cast<int>(std::lround(layout.small_grid_mm * dpi / 25.4));
    int best_lag = 0;
    double best = -1e300;
    for (int lag = 2; lag <= 3 * expected / 2; ++lag) {
      double acc = 0.0;
      for (int x = 0; x + lag < img.width; ++x) {
        acc += density[static_cast<std::size_t>(x)] * density[static_cast<std::size_t>(x + lag)];
      }
      acc /= (img.width - lag);
      if (acc > best) {
        best = acc;
        best_lag = lag;
      }
    }
    EXPECT_EQ(best_lag, expected) << "dpi " << dpi;
  }
}

TEST(Render, DeterministicWithSeed) {
  PaperLayout layout;
  layout.dpi = 100;
  DegradationSpec spec;
  spec.gaussian_noise_sigma = 8;
  spec.rotation_deg = 1.5;
  spec.seed = 42;
  const SignalSet s = synth_ecg(500, 10, 70, 3);
  EXPECT_EQ(render(s, layout, spec).pixels, render(s, layout, spec).pixels);
  DegradationSpec other = spec;
  other.seed = 43;
  EXPECT_NE(render(s, layout, spec).pixels, render(s, layout, other).pixels);
}

TEST(Render, TruthCountsMatchMasks) {
  PaperLayout layout;
  layout.dpi = 100;
  const RenderOutput out = render_with_truth(synth_ecg(500, 10, 70, 1), layout);
  EXPECT_EQ(out.truth.trace_pixels, out.truth.trace.count());
  EXPECT_EQ(out.truth.grid_pixels, out.truth.grid.count());
  for (std::size_t i = 0; i < out.truth.trace.ink.size(); ++i) {
    ASSERT_FALSE(out.truth.trace.ink[i] && out.truth.grid.ink[i]);
  }
  const nlohmann::json manifest =
      render_manifest(layout, {}, out.truth, out.image.width, out.image.height);
  EXPECT_EQ(manifest["width_px"], out.image.width);
  EXPECT_EQ(manifest["trace_pixels"], out.truth.trace_pixels);
}

TEST(Synth, DeterministicAndBounded) {
  const SyntheticEcg a = synth_ecg_detailed(1000, 10, 72, 5);
  const SyntheticEcg b = synth_ecg_detailed(1000, 10, 72, 5);
  EXPECT_EQ(a.signals.samples, b.signals.samples);
  EXPECT_EQ(a.signals.n_leads(), 12u);
  EXPECT_EQ(a.signals.n_samples(), 10000u);
  for (const auto& lead : a.signals.samples) {
    for (double v : lead) ASSERT_LE(std::abs(v), kSynthPeakLimitMv);
  }
  EXPECT_NE(synth_ecg(1000, 10, 72, 6).samples, a.signals.samples);
}

TEST(Synth, TenBeatsAtSixty) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_EQ(synth_ecg_detailed(1000, 10, 60, seed).r_peak_times_s.size(), 10u);
  }
}

TEST(Synth, RejectsOutOfRange) {
  EXPECT_THROW(synth_ecg(50, 10, 60), ValidationError);
  EXPECT_THROW(synth_ecg(500, 0, 60), ValidationError);
  EXPECT_THROW(synth_ecg(500, 10, 20), ValidationError);
  EXPECT_THROW(synth_ecg(500, 10, 250), ValidationError);
}

// Over a whole number of beats, the sampled mean equals the template integral
// per period.
TEST(Synth, BeatMeanMatchesQuadrature) {
  for (double hr : {50.0, 72.0, 100.0}) {
    const double fs = 1000.0;
    const SyntheticEcg ecg = synth_ecg_detailed(fs, 10, hr, 9);
    const double t0 = ecg.r_peak_times_s.front();
    const int beats = static_cast<int>((10.0 - t0) / ecg.period_s);
    ASSERT_GE(beats, 3);
    const auto begin = static_cast<std::size_t>(std::ceil(t0 * fs));
    const auto count = static_cast<std::size_t>(std::lround(beats * ecg.period_s * fs));
    for (std::size_t lead = 0; lead < 12; ++lead) {
      std::vector<oracle::Bump> bumps;
      for (const auto& b : ecg.templates[lead]) bumps.push_back({b.amplitude_mv, b.center_s, b.width_s});
      const double expected = oracle::simpson(bumps, -3.0, 3.0, 6000) / ecg.period_s;
      const auto& v = ecg.signals.samples[lead];
      double sum = 0.0;
      for (std::size_t i = begin; i < begin + count; ++i) sum += v[i];
      EXPECT_NEAR(sum / static_cast<double>(count), expected, 2e-3) << "hr " << hr << " lead " << lead;
    }
  }
}
