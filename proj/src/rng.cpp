#include "amem/rng.hpp"

#include <cmath>
#include <numbers>

namespace amem {

Rng Rng::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = mix64(seed + 0x243f6a8885a308d3ULL);
  for (std::uint64_t tag : path) key = mix64(key ^ mix64(tag + 0x13198a2e03707344ULL));
  return Rng(key);
}

Rng Rng::derive(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> path) {
  Rng base = derive(seed, {static_cast<std::uint64_t>(stream)});
  for (std::uint64_t tag : path) base = base.split(tag);
  return base;
}

Rng Rng::split(std::uint64_t tag) const {
  Rng child(0);
  child.key_ = mix64(key_ ^ mix64(tag ^ 0xa4093822299f31d0ULL));
  return child;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace amem
