#pragma once

#include <cstdint>
#include <random>

namespace centerward {

/// Seeded stream of doubles in [0, 1).
///
/// Uses the raw 64-bit Mersenne twister output and a fixed 53-bit conversion so
/// that streams are identical across standard library implementations (the
/// std::*_distribution classes are not).
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double operator()() { return next(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(next() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

/// Van der Corput radical inverse of i in the given base; coordinate of the Halton sequence.
double radical_inverse(std::uint64_t i, unsigned base);

/// k-th prime (k = 0 -> 2), used to pick Halton bases.
unsigned nth_prime(unsigned k);

}  // namespace centerward
