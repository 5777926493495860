#include <random>

#include <gtest/gtest.h>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"
#include "ecgscan/paper_render.hpp"
#include "ecgscan/preprocess.hpp"
#include "ecgscan/synth.hpp"
#include "otsu_oracle.hpp"

using namespace ecgscan;

namespace {

SignalSet zeros() {
  SignalSet s;
  s.sampling_hz = 500;
  for (auto lead : kStandardLeads) {
    s.lead_names.emplace_back(lead);
    s.samples.emplace_back(5000, 0.0);
  }
  return s;
}

RenderOutput render_at(double dpi, DegradationSpec spec = {}, std::uint64_t seed = 1) {
  PaperLayout layout;
  layout.dpi = dpi;
  return render_with_truth(synth_ecg(500, 10, 70, seed), layout, spec);
}

}  // namespace

TEST(Grayscale, Weights) {
  RgbImage rgb = RgbImage::filled(3, 1, 255, 255, 255);
  rgb.set(1, 0, 0, 0, 0);
  rgb.set(2, 0, 255, 0, 0);
  rgb.dpi = 150;
  const RasterImage g = to_grayscale(rgb);
  EXPECT_EQ(g.at(0, 0), 255);
  EXPECT_EQ(g.at(1, 0), 0);
  EXPECT_EQ(g.at(2, 0), 76);
  EXPECT_EQ(g.dpi, rgb.dpi);
}

TEST(Otsu, BimodalTakesSmallestOptimum) {
  Histogram h{};
  h[50] = 100;
  h[200] = 100;
  EXPECT_EQ(otsu_threshold(h), 50);
}

TEST(Otsu, Degenerate) {
  Histogram h{};
  EXPECT_THROW(otsu_threshold(h), DegenerateHistogramError);
  h[17] = 1000;
  EXPECT_THROW(otsu_threshold(h), DegenerateHistogramError);
}

TEST(Otsu, MatchesExactOracleOnRandomHistograms) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Histogram h{};
    const int populated = std::uniform_int_distribution<int>(2, 256)(rng);
    const auto max_count = trial % 3 == 0 ? 1000000000ull : 5000ull;
    std::uniform_int_distribution<int> bin(0, 255);
    std::uniform_int_distribution<std::uint64_t> count(1, max_count);
    for (int i = 0; i < populated; ++i) h[static_cast<std::size_t>(bin(rng))] += count(rng);
    const auto expected = oracle::otsu(h);
    if (!expected) {
      EXPECT_THROW(otsu_threshold(h), DegenerateHistogramError);
      continue;
    }
    ASSERT_EQ(otsu_threshold(h), *expected) << "trial " << trial;
  }
}

TEST(Otsu, MatchesOracleOnRenderedPages) {
  for (double sigma : {0.0, 8.0}) {
    DegradationSpec spec;
    spec.gaussian_noise_sigma = sigma;
    const Histogram h = histogram(render_at(100, spec).image);
    EXPECT_EQ(otsu_threshold(h), *oracle::otsu(h));
  }
}

TEST(Binarize, Basics) {
  EXPECT_EQ(binarize(RasterImage::filled(8, 8, 255), 255).count(), 0u);
  RasterImage checker = RasterImage::filled(8, 8, 255);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if ((x + y) % 2 == 0) checker.at(x, y) = 0;
    }
  }
  const InkMask m = binarize(checker, 128);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) EXPECT_EQ(m.at(x, y), (x + y) % 2 == 0);
  }
}

TEST(Binarize, MonotoneInThreshold) {
  std::mt19937_64 rng(4);
  RasterImage img = RasterImage::filled(64, 64, 0);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  InkMask prev = binarize(img, 256);
  for (int t = 255; t >= 0; t -= 7) {
    const InkMask cur = binarize(img, t);
    for (std::size_t i = 0; i < cur.ink.size(); ++i) ASSERT_LE(cur.ink[i], prev.ink[i]);
    prev = cur;
  }
}

TEST(Binarize, TraceOnlyPixelCount) {
  DegradationSpec spec;
  spec.draw_grid = false;
  const RenderOutput out = render_at(200, spec);
  const int t = otsu_threshold(histogram(out.image));
  const auto count = static_cast<double>(binarize(out.image, inclusive_cutoff(t)).count());
  const auto expected = static_cast<double>(out.truth.trace_pixels);
  EXPECT_NEAR(count, expected, 0.1 * expected);
}

TEST(DetectGrid, GridOnlyPeriod) {
  for (double dpi : {100.0, 200.0, 300.0}) {
    PaperLayout layout;
    layout.dpi = dpi;
    DegradationSpec spec;
    spec.draw_traces = false;
    const RasterImage img = render(zeros(), layout, spec);
    const InkMask mask = binarize(img, inclusive_cutoff(otsu_threshold(histogram(img))));
    const GridEstimate g = detect_grid(mask);
    ASSERT_TRUE(g.period_px.has_value()) << dpi;
    EXPECT_NEAR(*g.period_px, layout.small_grid_mm * dpi / 25.4, 1.0);
    EXPECT_GT(g.confidence, 0.35);
  }
}

TEST(DetectGrid, TraceOnlyAndEmpty) {
  DegradationSpec spec;
  spec.draw_grid = false;
  for (double dpi : {100.0, 200.0, 300.0}) {
    const RenderOutput out = render_at(dpi, spec);
    EXPECT_LT(detect_grid(out.truth.trace).confidence, 0.2) << dpi;
  }
  const GridEstimate empty = detect_grid(InkMask::empty_like(50, 40));
  EXPECT_EQ(empty.confidence, 0.0);
  EXPECT_TRUE(empty.vertical_line_columns.empty());
  EXPECT_TRUE(empty.horizontal_line_rows.empty());
}

TEST(RemoveGrid, TraceOnlyStopsAfterFirstPass) {
  DegradationSpec spec;
  spec.draw_grid = false;
  const RenderOutput out = render_at(200, spec);
  const GridRemovalResult r = remove_grid(out.image);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_DOUBLE_EQ(r.final_threshold, r.initial_threshold);
  EXPECT_DOUBLE_EQ(r.initial_threshold, otsu_threshold(histogram(out.image)));
  EXPECT_FALSE(r.grid_residual);
}

TEST(RemoveGrid, RemovesGridKeepsTrace) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RenderOutput out = render_at(200, {}, seed);
    int calls = 0;
    GridRemovalConfig cfg;
    cfg.on_iteration = [&](int, double, const InkMask&) { ++calls; };
    const GridRemovalResult r = remove_grid(out.image, cfg);
    EXPECT_LE(r.iterations, 20);
    EXPECT_EQ(calls, r.iterations);
    std::size_t residual = 0, kept = 0;
    for (std::size_t i = 0; i < r.mask.ink.size(); ++i) {
      residual += r.mask.ink[i] && out.truth.grid.ink[i];
      kept += r.mask.ink[i] && out.truth.trace.ink[i];
    }
    EXPECT_LE(static_cast<double>(residual), 0.005 * static_cast<double>(out.truth.grid_pixels));
    EXPECT_GE(static_cast<double>(kept), 0.95 * static_cast<double>(out.truth.trace_pixels));
  }
}

TEST(RemoveGrid, ThresholdsDecayMonotonically) {
  const RenderOutput out = render_at(100);
  std::vector<double> ts;
  GridRemovalConfig cfg;
  cfg.on_iteration = [&](int, double t, const InkMask&) { ts.push_back(t); };
  const GridRemovalResult r = remove_grid(out.image, cfg);
  ASSERT_FALSE(ts.empty());
  EXPECT_DOUBLE_EQ(ts.front(), r.initial_threshold);
  EXPECT_DOUBLE_EQ(ts.back(), r.final_threshold);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    EXPECT_NEAR(ts[i], ts[i - 1] * 0.95, 1e-9);
    EXPECT_GE(ts[i], 0.3 * ts.front());
  }
}

TEST(RemoveGrid, TerminatesOnAdversarialInputs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    RasterImage img = RasterImage::filled(120, 90, 255);
    const int period = 3 + trial;
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x % period == 0 || y % period == 0) img.at(x, y) = static_cast<std::uint8_t>(rng() % 20);
      }
    }
    GridRemovalConfig cfg;
    cfg.max_iters = 20;
    const GridRemovalResult r = remove_grid(img, cfg);
    EXPECT_LE(r.iterations, 20);
    EXPECT_GE(r.iterations, 1);
  }
  EXPECT_THROW(remove_grid(RasterImage::filled(30, 30, 255)), DegenerateHistogramError);
}
