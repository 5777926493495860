#include <algorithm>
#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "ecgscan/digitize.hpp"
#include "ecgscan/metrics.hpp"
#include "ecgscan/paper_render.hpp"
#include "ecgscan/preprocess.hpp"
#include "ecgscan/synth.hpp"
#include "ecgscan/trace_extract.hpp"

using namespace ecgscan;

namespace {

const RasterImage& page(int dpi) {
  static std::map<int, RasterImage> cache;
  auto it = cache.find(dpi);
  if (it == cache.end()) {
    PaperLayout layout;
    layout.dpi = dpi;
    it = cache.emplace(dpi, render(synth_ecg(500, 10, 70, 1), layout)).first;
  }
  return it->second;
}

void BM_Otsu(benchmark::State& state) {
  const Histogram h = histogram(page(200));
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(h));
}
BENCHMARK(BM_Otsu);

void BM_RemoveGrid(benchmark::State& state) {
  const RasterImage& img = page(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(remove_grid(img));
}
BENCHMARK(BM_RemoveGrid)->Arg(100)->Arg(200)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LeastCostPath(benchmark::State& state) {
  std::mt19937_64 rng(1);
  ColumnNodes nodes;
  const int per_col = static_cast<int>(state.range(0));
  for (int c = 0; c < 2000; ++c) {
    std::vector<CandidateNode> col;
    for (int k = 0; k < per_col; ++k) col.push_back({c, static_cast<double>(rng() % 200), 1});
    std::sort(col.begin(), col.end(), [](auto& a, auto& b) { return a.y_center < b.y_center; });
    nodes.columns.push_back(col);
  }
  const RowBand band{0, 200, 0};
  for (auto _ : state) benchmark::DoNotOptimize(least_cost_path(nodes, band));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_LeastCostPath)->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Digitize(benchmark::State& state) {
  const int dpi = static_cast<int>(state.range(0));
  PaperLayout layout;
  layout.dpi = dpi;
  DigitizeOptions opt;
  opt.layout = layout;
  const RasterImage& img = page(dpi);
  for (auto _ : state) benchmark::DoNotOptimize(digitize(img, opt));
}
BENCHMARK(BM_Digitize)->Arg(100)->Arg(200)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_MetricsReport(benchmark::State& state) {
  const SignalSet ref = synth_ecg(500, 10, 70, 1);
  const SignalSet est = synth_ecg(500, 10, 70, 2);
  for (auto _ : state) benchmark::DoNotOptimize(report(ref, est));
}
BENCHMARK(BM_MetricsReport)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
