#include "centerward/rng.hpp"

#include <array>
#include <stdexcept>

namespace centerward {

double radical_inverse(std::uint64_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

unsigned nth_prime(unsigned k) {
  static constexpr std::array<unsigned, 16> primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (k >= primes.size()) throw std::out_of_range("nth_prime: Halton dimension too large");
  return primes[k];
}

}  // namespace centerward
