#pragma once

#include <cmath>
#include <cstdint>

namespace deadneuron {

// splitmix64 finalizer (public-domain mixing function).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic splittable stream. fork(label) derives an independent child
// stream without touching the parent, so draws depend only on (seed, fork
// path, position) — never on thread scheduling or on the sizes of sibling
// streams. That is what makes reports byte-identical across --threads values.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x6a09e667f3bcc908ull)) {}

  Rng fork(std::uint64_t label) const {
    Rng child(from_state{}, mix64(state_ ^ mix64(label ^ 0xbb67ae8584caa73bull)));
    return child;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1), safe under log().
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [-halfwidth, halfwidth).
  double uniform_symmetric(double halfwidth) { return (2.0 * uniform01() - 1.0) * halfwidth; }

  // Box-Muller, exactly two draws per call (fixed draw count keeps streams
  // aligned regardless of realized values; no cached second sample).
  double normal(double stddev) {
    double u1 = uniform01_open();
    double u2 = uniform01();
    return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  struct from_state {};
  Rng(from_state, std::uint64_t s) : state_(s) {}
  std::uint64_t state_;
};

}  // namespace deadneuron
