#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ecgscan/signal_set.hpp"

namespace ecgscan {

inline constexpr const char* kMetricsVersion = "ecgscan-metrics-1";

/// Matched sample pairs after shifting the estimate by `lag` samples:
/// ref[i] is paired with est[i + lag].
struct Alignment {
  int lag = 0;
  std::vector<double> ref;
  std::vector<double> est;
};

/// Picks the lag in [-max_lag, max_lag] samples that maximises the
/// cross-correlation sum over observed pairs (est_observed empty = all
/// observed). Ties go to the smallest |lag|, then the negative one. Throws
/// AlignmentError when fewer than one second of pairs remains; max_lag_s = 0
/// pairs samples index for index.
Alignment align(std::span<const double> ref, std::span<const double> est, double sampling_hz,
                double max_lag_s, std::span<const std::uint8_t> est_observed = {});

/// 10 log10(mean(ref^2) / mean((ref - est)^2)); +inf for an exact match,
/// -inf when the reference is silent but the estimate is not.
double snr_db(std::span<const double> ref, std::span<const double> est);

struct SnrAggregates {
  std::optional<double> mean_db;    ///< over finite entries; the shared infinity if none
  std::optional<double> median_db;  ///< unset when the central pair includes an infinity
  std::size_t n_infinite = 0;
};

/// Mean excludes infinities. Median throws UndefinedMetricError when the
/// two central values of an even-length list include an infinity.
double snr_median(std::span<const double> snr);
SnrAggregates snr_aggregates(std::span<const double> snr);

/// sup |ECDF_ref - ECDF_est| over sample amplitudes.
double ks_metric(std::span<const double> ref, std::span<const double> est);

/// Weighted mean absolute difference with weights 1 + |ref - median| / max|ref - median|.
double wad(std::span<const double> ref, std::span<const double> est);

/// Mean of +1 / -1 agreement under tolerance beta * (max(ref) - min(ref)).
double asci(std::span<const double> ref, std::span<const double> est, double beta = 0.05);

struct MetricsOptions {
  bool align = true;
  double max_lag_s = 0.5;
  double asci_beta = 0.05;
  bool use_coverage = true;
};

struct LeadMetrics {
  std::string lead;
  double snr_db = 0.0;
  double ks = 0.0;
  double wad = 0.0;
  double asci = 0.0;
  int lag = 0;
  std::size_t n_samples = 0;  ///< pairs scored
};

struct MetricsReport {
  std::string version = kMetricsVersion;
  MetricsOptions options;
  std::vector<LeadMetrics> leads;
  SnrAggregates snr;
  double ks_mean = 0.0;
  double wad_mean = 0.0;
  double asci_mean = 0.0;

  /// Header and one row for batch summaries.
  static std::string csv_header();
  std::string csv_row(const std::string& record) const;
};

/// Scores every lead of `ref` that `est` also has. est_coverage, when given,
/// is parallel to est.lead_names. Throws ContractViolation when no lead is
/// shared or the rates differ.
MetricsReport report(const SignalSet& ref, const SignalSet& est,
                     const std::vector<std::vector<std::uint8_t>>* est_coverage = nullptr,
                     const MetricsOptions& options = {});

void to_json(nlohmann::json& j, const MetricsOptions& o);
void from_json(const nlohmann::json& j, MetricsOptions& o);
/// Infinite SNRs serialise as the strings "inf" and "-inf".
void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);

/// Shortest decimal that round-trips, "inf"/"-inf" for infinities.
std::string format_number(double v);

}  // namespace ecgscan
