#include "ecgscan/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_equal(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw ContractViolation(std::string(what) + ": length mismatch");
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

nlohmann::json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw FormatError("unexpected numeric string: " + s);
  }
  return j.get<double>();
}

}  // namespace

Alignment align(std::span<const double> ref, std::span<const double> est, double sampling_hz,
                double max_lag_s, std::span<const std::uint8_t> est_observed) {
  if (!(sampling_hz > 0.0)) throw ContractViolation("sampling rate must be positive");
  if (!(max_lag_s >= 0.0)) throw ContractViolation("max_lag_s must be >= 0");
  if (!est_observed.empty() && est_observed.size() != est.size()) {
    throw ContractViolation("coverage length differs from the estimate");
  }
  const auto observed = [&](std::ptrdiff_t j) { return est_observed.empty() || est_observed[static_cast<std::size_t>(j)]; };
  const auto n_ref = static_cast<std::ptrdiff_t>(ref.size());
  const auto n_est = static_cast<std::ptrdiff_t>(est.size());
  const auto max_lag = static_cast<std::ptrdiff_t>(std::floor(max_lag_s * sampling_hz));

  const auto pairs = [&](std::ptrdiff_t lag, Alignment& out) {
    out.lag = static_cast<int>(lag);
    out.ref.clear();
    out.est.clear();
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -lag); i < n_ref && i + lag < n_est; ++i) {
      if (!observed(i + lag)) continue;
      out.ref.push_back(ref[static_cast<std::size_t>(i)]);
      out.est.push_back(est[static_cast<std::size_t>(i + lag)]);
    }
  };

  Alignment result;
  if (max_lag == 0) {
    pairs(0, result);
    return result;
  }

  std::ptrdiff_t best_lag = 0;
  double best = -kInf;
  // Candidates in order 0, -1, +1, -2, +2, ... so ties keep the first seen.
  for (std::ptrdiff_t step = 0; step <= 2 * max_lag; ++step) {
    const std::ptrdiff_t lag = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
    double sum = 0.0;
    bool any = false;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -lag); i < n_ref && i + lag < n_est; ++i) {
      if (!observed(i + lag)) continue;
      sum += ref[static_cast<std::size_t>(i)] * est[static_cast<std::size_t>(i + lag)];
      any = true;
    }
    if (any && sum > best) {
      best = sum;
      best_lag = lag;
    }
  }
  pairs(best_lag, result);
  if (static_cast<double>(result.ref.size()) < sampling_hz) {
    throw AlignmentError("overlap shorter than 1 s at lag " + std::to_string(best_lag));
  }
  return result;
}

double snr_db(std::span<const double> ref, std::span<const double> est) {
  require_equal(ref, est, "snr_db");
  if (ref.empty()) throw ContractViolation("snr_db of empty signals");
  double p_orig = 0.0;
  double p_noise = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - est[i];
    p_orig += ref[i] * ref[i];
    p_noise += d * d;
  }
  if (p_noise == 0.0) return kInf;
  if (p_orig == 0.0) return -kInf;
  // The 1/n factors of both means cancel.
  return 10.0 * std::log10(p_orig / p_noise);
}

double snr_median(std::span<const double> snr) {
  if (snr.empty()) throw ContractViolation("median of an empty SNR list");
  std::vector<double> v(snr.begin(), snr.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  if (std::isinf(v[mid - 1]) || std::isinf(v[mid])) {
    throw UndefinedMetricError("SNR median falls between infinite values");
  }
  return 0.5 * (v[mid - 1] + v[mid]);
}

SnrAggregates snr_aggregates(std::span<const double> snr) {
  if (snr.empty()) throw ContractViolation("aggregates of an empty SNR list");
  SnrAggregates out;
  double sum = 0.0;
  std::size_t finite = 0;
  bool has_pos = false;
  bool has_neg = false;
  for (double v : snr) {
    if (std::isinf(v)) {
      ++out.n_infinite;
      (v > 0 ? has_pos : has_neg) = true;
    } else {
      sum += v;
      ++finite;
    }
  }
  if (finite > 0) {
    out.mean_db = sum / static_cast<double>(finite);
  } else if (has_pos != has_neg) {
    out.mean_db = has_pos ? kInf : -kInf;
  }
  try {
    out.median_db = snr_median(snr);
  } catch (const UndefinedMetricError&) {
  }
  return out;
}

double ks_metric(std::span<const double> ref, std::span<const double> est) {
  if (ref.empty() || est.empty()) throw ContractViolation("ks_metric of empty signals");
  std::vector<double> a(ref.begin(), ref.end());
  std::vector<double> b(est.begin(), est.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double wad(std::span<const double> ref, std::span<const double> est) {
  require_equal(ref, est, "wad");
  if (ref.empty()) throw ContractViolation("wad of empty signals");
  const double med = median_of(std::vector<double>(ref.begin(), ref.end()));
  double max_dev = 0.0;
  for (double r : ref) max_dev = std::max(max_dev, std::abs(r - med));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double w = max_dev > 0.0 ? 1.0 + std::abs(ref[i] - med) / max_dev : 1.0;
    num += w * std::abs(ref[i] - est[i]);
    den += w;
  }
  return num / den;
}

double asci(std::span<const double> ref, std::span<const double> est, double beta) {
  require_equal(ref, est, "asci");
  if (ref.empty()) throw ContractViolation("asci of empty signals");
  if (!(beta > 0.0 && beta < 1.0)) throw ContractViolation("asci beta must lie in (0, 1)");
  const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
  const double tau = beta * (*hi - *lo);
  long sum = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) sum += std::abs(ref[i] - est[i]) <= tau ? 1 : -1;
  return static_cast<double>(sum) / static_cast<double>(ref.size());
}

MetricsReport report(const SignalSet& ref, const SignalSet& est,
                     const std::vector<std::vector<std::uint8_t>>* est_coverage,
                     const MetricsOptions& options) {
  if (ref.sampling_hz != est.sampling_hz) {
    throw ContractViolation("sampling rates differ: " + format_number(ref.sampling_hz) + " vs " +
                            format_number(est.sampling_hz));
  }
  if (est_coverage && est_coverage->size() != est.n_leads()) {
    throw ContractViolation("coverage does not match the estimate's leads");
  }
  MetricsReport out;
  out.options = options;
  std::vector<double> snrs;
  for (std::size_t l = 0; l < ref.n_leads(); ++l) {
    const auto k = est.find_lead(ref.lead_names[l]);
    if (!k) continue;
    std::span<const std::uint8_t> observed;
    if (options.use_coverage && est_coverage) observed = (*est_coverage)[*k];
    const double lag_s = options.align ? options.max_lag_s : 0.0;
    const Alignment a = align(ref.samples[l], est.samples[*k], ref.sampling_hz, lag_s, observed);
    if (a.ref.empty()) throw AlignmentError("lead " + ref.lead_names[l] + " has no observed samples");

    LeadMetrics m;
    m.lead = ref.lead_names[l];
    m.lag = a.lag;
    m.n_samples = a.ref.size();
    m.snr_db = snr_db(a.ref, a.est);
    m.ks = ks_metric(a.ref, a.est);
    m.wad = wad(a.ref, a.est);
    m.asci = asci(a.ref, a.est, options.asci_beta);
    snrs.push_back(m.snr_db);
    out.ks_mean += m.ks;
    out.wad_mean += m.wad;
    out.asci_mean += m.asci;
    out.leads.push_back(std::move(m));
  }
  if (out.leads.empty()) throw ContractViolation("reference and estimate share no leads");
  const auto n = static_cast<double>(out.leads.size());
  out.ks_mean /= n;
  out.wad_mean /= n;
  out.asci_mean /= n;
  out.snr = snr_aggregates(snrs);
  return out;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string MetricsReport::csv_header() {
  return "record,n_leads,snr_mean_db,snr_median_db,n_infinite,ks_mean,wad_mean,asci_mean";
}

std::string MetricsReport::csv_row(const std::string& record) const {
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  return record + "," + std::to_string(leads.size()) + "," + opt(snr.mean_db) + "," +
         opt(snr.median_db) + "," + std::to_string(snr.n_infinite) + "," +
         format_number(ks_mean) + "," + format_number(wad_mean) + "," + format_number(asci_mean);
}

void to_json(nlohmann::json& j, const MetricsOptions& o) {
  j = {{"align", o.align},
       {"max_lag_s", o.max_lag_s},
       {"asci_beta", o.asci_beta},
       {"use_coverage", o.use_coverage}};
}

void from_json(const nlohmann::json& j, MetricsOptions& o) {
  o.align = j.at("align").get<bool>();
  o.max_lag_s = j.at("max_lag_s").get<double>();
  o.asci_beta = j.at("asci_beta").get<double>();
  o.use_coverage = j.at("use_coverage").get<bool>();
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  nlohmann::json leads = nlohmann::json::array();
  for (const auto& m : r.leads) {
    leads.push_back({{"lead", m.lead},
                     {"snr_db", number_json(m.snr_db)},
                     {"ks", m.ks},
                     {"wad", m.wad},
                     {"asci", m.asci},
                     {"lag", m.lag},
                     {"n_samples", m.n_samples}});
  }
  const auto opt = [](const std::optional<double>& v) {
    return v ? number_json(*v) : nlohmann::json(nullptr);
  };
  j = {{"version", r.version},
       {"options", r.options},
       {"leads", std::move(leads)},
       {"aggregates",
        {{"snr_mean_db", opt(r.snr.mean_db)},
         {"snr_median_db", opt(r.snr.median_db)},
         {"n_infinite", r.snr.n_infinite},
         {"ks_mean", r.ks_mean},
         {"wad_mean", r.wad_mean},
         {"asci_mean", r.asci_mean}}}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  r.version = j.at("version").get<std::string>();
  if (r.version != kMetricsVersion) throw FormatError("unsupported metrics version " + r.version);
  r.options = j.at("options").get<MetricsOptions>();
  r.leads.clear();
  for (const auto& e : j.at("leads")) {
    LeadMetrics m;
    m.lead = e.at("lead").get<std::string>();
    m.snr_db = number_from_json(e.at("snr_db"));
    m.ks = e.at("ks").get<double>();
    m.wad = e.at("wad").get<double>();
    m.asci = e.at("asci").get<double>();
    m.lag = e.at("lag").get<int>();
    m.n_samples = e.at("n_samples").get<std::size_t>();
    r.leads.push_back(std::move(m));
  }
  const auto& a = j.at("aggregates");
  const auto opt = [](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return number_from_json(v);
  };
  r.snr.mean_db = opt(a.at("snr_mean_db"));
  r.snr.median_db = opt(a.at("snr_median_db"));
  r.snr.n_infinite = a.at("n_infinite").get<std::size_t>();
  r.ks_mean = a.at("ks_mean").get<double>();
  r.wad_mean = a.at("wad_mean").get<double>();
  r.asci_mean = a.at("asci_mean").get<double>();
}

}  // namespace ecgscan
