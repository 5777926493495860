#pragma once

// Exhaustive Otsu scan in exact rational arithmetic.

#include <array>
#include <cstdint>
#include <optional>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

/// w0 * w1 * (mu0 - mu1)^2 for the split "<= t | > t"; nullopt when a class
/// is empty.
inline std::optional<Rational> between_class_variance(const std::array<std::uint64_t, 256>& h,
                                                       int t) {
  Rational n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (int v = 0; v < 256; ++v) {
    const Rational c = h[static_cast<std::size_t>(v)];
    if (v <= t) {
      n0 += c;
      s0 += c * v;
    } else {
      n1 += c;
      s1 += c * v;
    }
  }
  if (n0 == 0 || n1 == 0) return std::nullopt;
  const Rational n = n0 + n1;
  const Rational d = s0 / n0 - s1 / n1;
  return (n0 / n) * (n1 / n) * d * d;
}

/// Smallest t maximising the between-class variance; nullopt when fewer
/// than two bins are populated.
inline std::optional<int> otsu(const std::array<std::uint64_t, 256>& h) {
  std::optional<int> best_t;
  Rational best = -1;
  for (int t = 0; t < 256; ++t) {
    const auto v = between_class_variance(h, t);
    if (v && *v > best) {
      best = *v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace oracle
