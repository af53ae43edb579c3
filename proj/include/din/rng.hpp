#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace din {

/// The single random stream of a simulation: std::mt19937_64 (whose output
/// sequence is fixed by the standard) with hand-written transforms, so a seed
/// reproduces the same trajectory on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t reject_below = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < reject_below);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace din
