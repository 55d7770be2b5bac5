#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lrsdp {

// Seedable 64-bit generator with an explicit Box-Muller transform, so that
// generated instances are bit-identical across runs for a fixed seed (the
// normal_distribution in the standard library is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound).
  std::uint64_t uniform_int(std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrsdp
