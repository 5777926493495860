#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ecdf_oracle.hpp"
#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"
#include "ecgscan/metrics.hpp"
#include "ecgscan/synth.hpp"

using namespace ecgscan;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Vec = std::vector<double>;

Vec random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Snr, AnalyticCases) {
  const Vec ref{1, 0, -1, 0};
  EXPECT_EQ(snr_db(ref, ref), kInf);
  EXPECT_EQ(snr_db(ref, Vec(4, 0.0)), 0.0);
  EXPECT_NEAR(snr_db(ref, Vec{0.9, 0, -0.9, 0}), 20.0, 1e-9);
  EXPECT_EQ(snr_db(Vec(4, 0.0), ref), -kInf);
  EXPECT_EQ(snr_db(Vec(4, 0.0), Vec(4, 0.0)), kInf);
  EXPECT_THROW(snr_db(ref, Vec(3, 0.0)), ContractViolation);
  EXPECT_THROW(snr_db(Vec{}, Vec{}), ContractViolation);
}

TEST(Snr, JointScaleInvariance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec ref = random_vec(rng, 64);
    const Vec noise = random_vec(rng, 64, 0.3);
    const double a = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    Vec est(64), ref2(64), est2(64);
    for (std::size_t k = 0; k < 64; ++k) {
      est[k] = ref[k] + noise[k];
      ref2[k] = a * ref[k];
      est2[k] = a * est[k];
    }
    ASSERT_NEAR(snr_db(ref, est), snr_db(ref2, est2), 1e-9);
  }
}

TEST(SnrAggregates, Conventions) {
  const SnrAggregates a = snr_aggregates(Vec{10, 20, 30});
  EXPECT_DOUBLE_EQ(*a.mean_db, 20.0);
  EXPECT_DOUBLE_EQ(*a.median_db, 20.0);
  EXPECT_EQ(a.n_infinite, 0u);

  const SnrAggregates b = snr_aggregates(Vec{0, kInf});
  EXPECT_DOUBLE_EQ(*b.mean_db, 0.0);
  EXPECT_EQ(b.n_infinite, 1u);
  EXPECT_FALSE(b.median_db.has_value());
  EXPECT_THROW(snr_median(Vec{0, kInf}), UndefinedMetricError);

  EXPECT_DOUBLE_EQ(snr_median(Vec{3, 1, 2, 4}), 2.5);
  EXPECT_DOUBLE_EQ(snr_median(Vec{kInf, 1, 2}), 2.0);
  EXPECT_EQ(*snr_aggregates(Vec{kInf, kInf}).mean_db, kInf);
  EXPECT_THROW(snr_aggregates(Vec{}), ContractViolation);
}

TEST(Ks, Examples) {
  EXPECT_DOUBLE_EQ(ks_metric(Vec{1, 2, 3}, Vec{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_metric(Vec(5, -1.0), Vec(7, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(ks_metric(Vec{0, 0, 1, 1}, Vec{0, 1, 1, 1}), 0.25);
}

TEST(Ks, MatchesEcdfOracle) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng() % 40, m = 1 + rng() % 40;
    Vec a(n), b(m);
    // Small integer support forces many ties.
    for (auto& x : a) x = static_cast<double>(rng() % 6);
    for (auto& x : b) x = static_cast<double>(rng() % 6) + (i % 2 ? 0.5 : 0.0);
    ASSERT_NEAR(ks_metric(a, b), oracle::ks(a, b), 1e-12);
  }
}

TEST(Ks, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(20);
  for (int i = 0; i < 100; ++i) {
    const Vec a = random_vec(rng, 50), b = random_vec(rng, 60, 1.5);
    Vec ta(a), tb(b);
    for (auto& x : ta) x = std::exp(x) * 3.0 - 1.0;
    for (auto& x : tb) x = std::exp(x) * 3.0 - 1.0;
    ASSERT_DOUBLE_EQ(ks_metric(a, b), ks_metric(ta, tb));
  }
}

TEST(Wad, Examples) {
  EXPECT_DOUBLE_EQ(wad(Vec{1, 2, 3}, Vec{1, 2, 3}), 0.0);
  EXPECT_NEAR(wad(Vec(4, 2.0), Vec(4, 2.1)), 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(wad(Vec{0, 1, 0}, Vec{0, 0, 0}), 0.5);
  EXPECT_THROW(wad(Vec{0, 1}, Vec{0}), ContractViolation);
}

TEST(Asci, Examples) {
  EXPECT_DOUBLE_EQ(asci(Vec{0, 1, 2}, Vec{0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(asci(Vec{0, 1, 2}, Vec{5, 6, 7}), -1.0);
  const Vec ref{-1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(asci(ref, Vec{-0.95, 1.2, 0.0, 0.3}, 0.05), 0.0);
  EXPECT_THROW(asci(ref, Vec{0}), ContractViolation);
  EXPECT_THROW(asci(ref, ref, 0.0), ContractViolation);
  EXPECT_THROW(asci(ref, ref, 1.0), ContractViolation);
}

TEST(MetricRanges, RandomPairs) {
  std::mt19937_64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 200;
    const Vec a = random_vec(rng, n), b = random_vec(rng, n, 2.0);
    const double k = ks_metric(a, b), s = asci(a, b), w = wad(a, b);
    ASSERT_GE(k, 0.0);
    ASSERT_LE(k, 1.0);
    ASSERT_GE(s, -1.0);
    ASSERT_LE(s, 1.0);
    ASSERT_GE(w, 0.0);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) max_diff = std::max(max_diff, std::abs(a[j] - b[j]));
    ASSERT_LE(w, max_diff + 1e-12);
    ASSERT_EQ(ks_metric(a, a), 0.0);
    ASSERT_EQ(wad(a, a), 0.0);
    ASSERT_EQ(asci(a, a), 1.0);
    ASSERT_EQ(snr_db(a, a), kInf);
  }
}

TEST(Align, RecoversPlantedLags) {
  std::mt19937_64 rng(5);
  const double fs = 100;
  for (int lag : {-50, -17, -1, 0, 1, 10, 33, 50}) {
    const Vec base = random_vec(rng, 800);
    Vec ref(600), est(600);
    for (std::size_t i = 0; i < 600; ++i) {
      ref[i] = base[i + 100];
      est[i] = base[static_cast<std::size_t>(static_cast<int>(i) + 100 - lag)];
    }
    const Alignment a = align(ref, est, fs, 0.5);
    EXPECT_EQ(a.lag, lag);
    ASSERT_EQ(a.ref.size(), a.est.size());
    for (std::size_t i = 0; i < a.ref.size(); ++i) ASSERT_EQ(a.ref[i], a.est[i]);
  }
}

TEST(Align, PassthroughAndErrors) {
  std::mt19937_64 rng(6);
  const Vec ref = random_vec(rng, 300), est = random_vec(rng, 300);
  const Alignment a = align(ref, est, 100, 0.0);
  EXPECT_EQ(a.lag, 0);
  EXPECT_EQ(a.ref, ref);
  EXPECT_EQ(a.est, est);
  EXPECT_EQ(align(ref, ref, 100, 0.5).lag, 0);
  EXPECT_NO_THROW(align(Vec(150, 1.0), Vec(150, 1.0), 100, 0.4));
  EXPECT_THROW(align(Vec(90, 1.0), Vec(90, 1.0), 100, 0.4), AlignmentError);
  std::vector<std::uint8_t> observed(300, 0);
  for (std::size_t i = 0; i < 50; ++i) observed[i] = 1;
  EXPECT_THROW(align(ref, est, 100, 0.1, observed), AlignmentError);
}

TEST(Report, SelfAndZeros) {
  const SignalSet ref = synth_ecg(500, 10, 70, 1);
  const MetricsReport self = report(ref, ref);
  ASSERT_EQ(self.leads.size(), 12u);
  for (const auto& l : self.leads) {
    EXPECT_EQ(l.snr_db, kInf);
    EXPECT_EQ(l.ks, 0.0);
    EXPECT_EQ(l.wad, 0.0);
    EXPECT_EQ(l.asci, 1.0);
    EXPECT_EQ(l.lag, 0);
  }
  EXPECT_EQ(self.snr.n_infinite, 12u);

  SignalSet zero = ref;
  for (auto& v : zero.samples) std::fill(v.begin(), v.end(), 0.0);
  MetricsOptions noalign;
  noalign.align = false;
  const MetricsReport z = report(ref, zero, nullptr, noalign);
  EXPECT_DOUBLE_EQ(*z.snr.mean_db, 0.0);
}

TEST(Report, CoverageRestrictsScoring) {
  const SignalSet ref = synth_ecg(500, 10, 70, 2);
  SignalSet est = ref;
  std::vector<std::vector<std::uint8_t>> cov(12, std::vector<std::uint8_t>(5000, 0));
  for (std::size_t l = 0; l < 12; ++l) {
    for (std::size_t i = 0; i < 5000; ++i) {
      if (i < 3750) est.samples[l][i] = 0.0;
      else cov[l][i] = 1;
    }
  }
  MetricsOptions opt;
  opt.align = false;
  const MetricsReport r = report(ref, est, &cov, opt);
  for (const auto& l : r.leads) {
    EXPECT_EQ(l.snr_db, kInf);
    EXPECT_EQ(l.n_samples, 1250u);
  }
  opt.use_coverage = false;
  EXPECT_LT(*report(ref, est, &cov, opt).snr.mean_db, 10.0);
}

TEST(Report, Errors) {
  const SignalSet ref = synth_ecg(500, 10, 70, 1);
  SignalSet other = synth_ecg(250, 10, 70, 1);
  EXPECT_THROW(report(ref, other), ContractViolation);
  SignalSet named = ref;
  named.lead_names = {"A", "B", "C", "D", "E", "F", "G", "H", "J", "K", "L", "M"};
  EXPECT_THROW(report(ref, named), ContractViolation);
}

TEST(Report, JsonRoundTripAndCsv) {
  const SignalSet ref = synth_ecg(500, 10, 70, 3);
  SignalSet est = ref;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0, 0.05);
  for (std::size_t l = 1; l < 12; ++l) {
    for (auto& v : est.samples[l]) v += noise(rng);
  }
  const MetricsReport r = report(ref, est);
  const nlohmann::json j = r;
  EXPECT_EQ(j["version"], kMetricsVersion);
  EXPECT_EQ(j["leads"][0]["snr_db"], "inf");
  const MetricsReport back = j.get<MetricsReport>();
  EXPECT_EQ(nlohmann::json(back).dump(), j.dump());
  EXPECT_EQ(back.leads[3].snr_db, r.leads[3].snr_db);
  EXPECT_EQ(MetricsReport::csv_header(),
            "record,n_leads,snr_mean_db,snr_median_db,n_infinite,ks_mean,wad_mean,asci_mean");
  const std::string row = r.csv_row("rec");
  EXPECT_EQ(row.rfind("rec,12,", 0), 0u);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 7);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-kInf), "-inf");
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::normal_distribution<double>(0, 1e3)(rng);
    ASSERT_EQ(std::stod(format_number(v)), v);
  }
}
