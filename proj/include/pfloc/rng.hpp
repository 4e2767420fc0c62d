// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace pfloc::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix_next(std::uint64_t& state) {
  state += kGolden;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based deterministic stream addressed by a key tuple.
///
/// Every consumer owns its own stream keyed by (seed, task ids...); streams are
/// never shared between tasks, so results do not depend on scheduling. The
/// uniform/gaussian conversions are implemented here rather than with
/// <random> distributions because the standard leaves those
/// implementation-defined and the outputs must be reproducible byte for byte.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                  std::uint64_t k3 = 0)
      : state_(0x243f6a8885a308d3ULL) {
    absorb(seed);
    absorb(k1);
    absorb(k2);
    absorb(k3);
  }

  std::uint64_t next() { return splitmix_next(state_); }

  /// Uniform in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe as a log() argument.
  double u01_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double gaussian(double mean = 0.0, double stddev = 1.0) {
    const double u = u01_open();
    const double v = u01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * std::sqrt(-2.0 * std::log(u)) * std::cos(two_pi * v);
  }

  bool bit() { return (next() & 1ULL) != 0; }

  /// Uniform integer in [0, n). Modulo bias is below 2^-53 for the n used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  void absorb(std::uint64_t k) {
    state_ ^= k + kGolden + (state_ << 6) + (state_ >> 2);
    splitmix_next(state_);
  }

  std::uint64_t state_;
};

}  // namespace pfloc::rng
