//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qubo {

// Every random quantity in the project comes from std::mt19937_64 (whose
// output sequence is fixed by the C++ standard) seeded through splitmix64.
// The std:: distributions are implementation-defined, so the conversions to
// uniform/normal/index values below are spelled out explicitly.
//
// Stream derivation:
//   stream_seed(seed, tag, index) = splitmix64(splitmix64(seed ^ tag) + index)
// with one tag per consumer, so instance generation never shares a stream
// with a solver that uses the same numeric seed.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamTag : std::uint64_t {
  kInstance = 0x51554231'494e5354ULL,  // "QUB1INST"
  kGradInit = 0x51554231'47524144ULL,  // "QUB1GRAD"
  kAnnealRead = 0x51554231'52454144ULL, // "QUB1READ"
  kBaseline = 0x51554231'42415345ULL,  // "QUB1BASE"
};

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, StreamTag tag,
                                           std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(tag)) +
                    index);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1].
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi]; hi is reachable only through rounding.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), modulo with rejection of the biased
  /// low range.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r = engine_();
    while (r < threshold)
      r = engine_();
    return r % bound;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace qubo
