#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "polyiso/types.hpp"

namespace polyiso {

// All randomized routines draw through these helpers so that results are
// bit-identical for a fixed seed across platforms. mt19937_64 has a
// standardized output sequence; the double conversions below avoid
// distribution objects, whose streams are implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller, one value per call (the second is
  // discarded to keep the stream position easy to reason about).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Uniform over the solid ball of the given radius.
  Vector in_ball(int dim, double radius) {
    Vector dir(dim);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) dir[i] = normal();
      norm2 = dir.squaredNorm();
    } while (norm2 == 0.0);
    const double r = radius * std::pow(uniform01(), 1.0 / dim);
    return dir * (r / std::sqrt(norm2));
  }

  // Decorrelated child stream, for per-stage seeding.
  Rng split(std::uint64_t salt) {
    std::uint64_t z = engine_() + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace polyiso
