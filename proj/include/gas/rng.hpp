#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace gas {

// Seed derivation: one root seed per run, per-stage streams derived by label.
// Adding a new labeled stage never perturbs the streams of existing stages.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix64(root ^ h);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t index) {
  return mix64(derive_seed(root, label) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// mt19937_64 with hand-rolled output transforms. The engine sequence is
// pinned by the standard; std::uniform_real_distribution and
// std::normal_distribution are implementation-defined, so we do not use them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % n;
  }

  // standard normal via Box-Muller; consumes exactly two uniforms per call
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // guard log(0)
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gas
