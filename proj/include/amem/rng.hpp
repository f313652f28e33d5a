#pragma once

#include <cstdint>
#include <initializer_list>

namespace amem {

// Stream tags used to derive independent generators from one experiment seed.
enum class Stream : std::uint64_t {
  kPatterns = 0x70617474,
  kCorruption = 0x636f7272,
  kInit = 0x696e6974,
  kSampling = 0x73616d70,
  kBootstrap = 0x626f6f74,
  kSearch = 0x636d6165,
};

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th draw is mix64(key + k * golden_gamma).
///
/// Streams are derived by hashing a seed together with a path of tags, so
/// pattern generation, corruption, initialization and sampling never share
/// state and results do not depend on the order in which streams are used.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t key) : key_(mix64(key ^ 0x6a09e667f3bcc909ULL)) {}

  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
  static Rng derive(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> path = {});

  Rng split(std::uint64_t tag) const;

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  int sign() { return (next_u64() >> 63) != 0 ? 1 : -1; }

  // Standard normal via Box-Muller; no cached second variate.
  double normal();

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace amem
