#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lak {

// SplitMix64 (Steele, Lea, Flood 2014). The i-th output of a stream seeded
// with s is mix(s + (i + 1) * kGamma), so any stream position is a pure
// function of (seed, counter). Test vectors live in tests/test_random.cpp.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on [0, n); unbiased by rejection. n must be > 0.
  constexpr std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch only, no cached spare).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  [[nodiscard]] constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Seed of an independent child stream, e.g. per tree or per tree node.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return SplitMix64::mix(SplitMix64::mix(parent) ^ SplitMix64::mix(index + SplitMix64::kGamma));
}

}  // namespace lak
