#pragma once

#include <cmath>
#include <cstdint>

namespace qbp {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// SplitMix-based stream with hand-rolled Box-Muller; identical output on
// every platform/standard library, which the byte-identical-rerun
// guarantees depend on.
struct Rng {
  uint64_t s;
  bool have_spare = false;
  double spare = 0.0;

  explicit Rng(uint64_t seed) : s(seed) {}
  uint64_t next() { return s = splitmix64(s); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  uint64_t below(uint64_t n) { return next() % n; }
  double gaussian() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare = r * std::sin(2.0 * 3.14159265358979323846 * u2);
    have_spare = true;
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
};

// stream derivation for (seed, index...) hierarchies
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b) ^ c);
}

}  // namespace qbp
