#pragma once

// Small hand-rolled generators for property tests. Every case is derived
// from (property seed, case index) so a failure message with the case index
// reproduces it exactly.

#include <cstdint>
#include <string>
#include <vector>

#include "lak/random.hpp"

namespace lak::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t u64() { return rng_.next(); }
  std::size_t size(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng_.bounded(hi - lo + 1)); }
  double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform01(); }
  bool coin() { return rng_.bounded(2) == 1; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(rng_.bounded(v.size()))];
  }

  std::string word(std::size_t lo, std::size_t hi, std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz") {
    std::string out(size(lo, hi), ' ');
    for (char& c : out) c = alphabet[static_cast<std::size_t>(rng_.bounded(alphabet.size()))];
    return out;
  }

  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (double& x : out) x = real(lo, hi);
    return out;
  }

  // Values drawn from a few levels, so ties and duplicates are common.
  std::vector<double> lumpy(std::size_t n, std::size_t levels) {
    std::vector<double> out(n);
    for (double& x : out) x = static_cast<double>(rng_.bounded(levels)) * 0.5;
    return out;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng_.bounded(i))]);
  }

 private:
  SplitMix64 rng_;
};

// Runs `body(gen, case_index)` for `cases` independently seeded cases.
template <class F>
void for_all(std::uint64_t property_seed, std::size_t cases, F&& body) {
  for (std::size_t i = 0; i < cases; ++i) {
    Gen g(derive_seed(property_seed, i));
    body(g, i);
  }
}

}  // namespace lak::test
