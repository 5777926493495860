#include "ecgscan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"

namespace ecgscan {

namespace {

// Nominal P, Q, R, S, T amplitudes (mV) of a normal resting ECG, in
// kStandardLeads order.
constexpr std::array<std::array<double, 5>, 12> kLeadAmplitudes = {{
    {0.10, -0.05, 0.80, -0.15, 0.25},    // I
    {0.15, -0.08, 1.20, -0.20, 0.35},    // II
    {0.06, -0.10, 0.55, -0.25, 0.15},    // III
    {-0.12, 0.05, -0.90, 0.10, -0.30},   // aVR
    {0.05, -0.08, 0.50, -0.30, 0.12},    // aVL
    {0.10, -0.08, 0.85, -0.20, 0.25},    // aVF
    {0.08, 0.00, 0.35, -1.00, -0.10},    // V1
    {0.08, 0.00, 0.60, -1.30, 0.40},     // V2
    {0.08, -0.05, 1.00, -0.90, 0.45},    // V3
    {0.10, -0.08, 1.50, -0.50, 0.45},    // V4
    {0.10, -0.10, 1.40, -0.30, 0.40},    // V5
    {0.10, -0.10, 1.10, -0.15, 0.30},    // V6
}};

constexpr double kSupportSigmas = 6.0;
constexpr double kPeakHeadroomMv = 1.95;

BeatTemplate make_template(const std::array<double, 5>& amp, double scale, double period_s) {
  // P-R and R-T spacing follow sqrt(RR) so fast rhythms stay separable.
  const double k = std::sqrt(period_s);
  return {{
      {amp[0] * scale, -0.17 * k, 0.022},
      {amp[1] * scale, -0.030, 0.010},
      {amp[2] * scale, 0.0, 0.011},
      {amp[3] * scale, 0.030, 0.011},
      {amp[4] * scale, 0.27 * k, 0.045 * k},
  }};
}

void add_beats(std::vector<double>& out, const BeatTemplate& tpl, double fs,
               const std::vector<double>& r_times) {
  const auto n = static_cast<long>(out.size());
  for (double r : r_times) {
    for (const auto& bump : tpl) {
      if (bump.amplitude_mv == 0.0) continue;
      const double centre = r + bump.center_s;
      const double reach = kSupportSigmas * bump.width_s;
      const long lo = std::max(0L, static_cast<long>(std::floor((centre - reach) * fs)));
      const long hi = std::min(n - 1, static_cast<long>(std::ceil((centre + reach) * fs)));
      const double inv = 1.0 / (2.0 * bump.width_s * bump.width_s);
      for (long i = lo; i <= hi; ++i) {
        const double d = static_cast<double>(i) / fs - centre;
        out[static_cast<std::size_t>(i)] += bump.amplitude_mv * std::exp(-d * d * inv);
      }
    }
  }
}

}  // namespace

SyntheticEcg synth_ecg_detailed(double fs, double duration_s, double heart_rate_bpm,
                                std::uint64_t seed) {
  if (!(fs >= 100.0)) throw ValidationError("synthetic sampling rate must be >= 100 Hz");
  if (!(duration_s > 0.0)) throw ValidationError("synthetic duration must be positive");
  if (!(heart_rate_bpm >= 30.0 && heart_rate_bpm <= 200.0)) {
    throw ValidationError("heart rate must lie in [30, 200] bpm");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> global_scale(0.85, 1.15);
  std::uniform_real_distribution<double> lead_scale(0.9, 1.1);
  std::uniform_real_distribution<double> phase(0.35, 0.55);

  SyntheticEcg out;
  out.period_s = 60.0 / heart_rate_bpm;
  const double g = global_scale(rng);
  const double phi = phase(rng);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));

  // Beats run one period past either edge so the record is a clean window
  // onto a periodic signal.
  std::vector<double> r_times;
  for (long k = -2;; ++k) {
    const double t = (phi + static_cast<double>(k)) * out.period_s;
    if (t > duration_s + 2.0 * out.period_s) break;
    r_times.push_back(t);
    if (t >= 0.0 && t < duration_s) out.r_peak_times_s.push_back(t);
  }

  out.signals.sampling_hz = fs;
  for (std::size_t lead = 0; lead < kStandardLeads.size(); ++lead) {
    BeatTemplate tpl = make_template(kLeadAmplitudes[lead], g * lead_scale(rng), out.period_s);
    std::vector<double> samples(n, 0.0);
    add_beats(samples, tpl, fs, r_times);

    double peak = 0.0;
    for (double v : samples) peak = std::max(peak, std::abs(v));
    if (peak > kPeakHeadroomMv) {
      const double shrink = kPeakHeadroomMv / peak;
      for (auto& bump : tpl) bump.amplitude_mv *= shrink;
      for (auto& v : samples) v *= shrink;
    }

    out.signals.lead_names.emplace_back(kStandardLeads[lead]);
    out.signals.samples.push_back(std::move(samples));
    out.templates.push_back(tpl);
  }
  return out;
}

}  // namespace ecgscan
