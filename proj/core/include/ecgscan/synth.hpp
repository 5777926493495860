#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecgscan/signal_set.hpp"

namespace ecgscan {

/// One Gaussian deflection: amplitude * exp(-(t - centre)^2 / (2 width^2)),
/// with centre relative to the beat's R peak.
struct WaveBump {
  double amplitude_mv = 0;
  double center_s = 0;
  double width_s = 0;
};

/// P, Q, R, S, T bumps of one lead.
using BeatTemplate = std::array<WaveBump, 5>;

struct SyntheticEcg {
  SignalSet signals;                   ///< 12 standard leads
  std::vector<BeatTemplate> templates;  ///< per lead, same order as signals
  std::vector<double> r_peak_times_s;   ///< R peaks inside [0, duration)
  double period_s = 0;
};

/// Deterministic 12-lead quasi-ECG. Requires fs >= 100, duration > 0 and
/// 30 <= heart_rate_bpm <= 200; every lead peaks at |x| <= 2 mV.
SyntheticEcg synth_ecg_detailed(double fs, double duration_s, double heart_rate_bpm,
                                std::uint64_t seed = 0);

inline SignalSet synth_ecg(double fs, double duration_s, double heart_rate_bpm,
                           std::uint64_t seed = 0) {
  return synth_ecg_detailed(fs, duration_s, heart_rate_bpm, seed).signals;
}

/// Maximum absolute amplitude emitted by synth_ecg.
inline constexpr double kSynthPeakLimitMv = 2.0;

}  // namespace ecgscan
