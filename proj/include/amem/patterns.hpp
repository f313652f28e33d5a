#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace amem {

/// Bipolar vector; every entry is -1 or +1.
using State = std::vector<std::int8_t>;

/// m bipolar patterns of length N stored row-major.
class PatternSet {
 public:
  PatternSet(std::size_t m, std::size_t n);
  PatternSet(std::size_t m, std::size_t n, std::vector<std::int8_t> data);

  std::size_t count() const { return m_; }
  std::size_t size() const { return n_; }
  double load() const { return static_cast<double>(m_) / static_cast<double>(n_); }

  std::span<const std::int8_t> row(std::size_t p) const { return {data_.data() + p * n_, n_}; }
  std::span<std::int8_t> row(std::size_t p) { return {data_.data() + p * n_, n_}; }
  std::int8_t operator()(std::size_t p, std::size_t i) const { return data_[p * n_ + i]; }
  State pattern(std::size_t p) const;
  const std::vector<std::int8_t>& data() const { return data_; }

  friend bool operator==(const PatternSet&, const PatternSet&) = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::int8_t> data_;
};

PatternSet gen_iid_patterns(std::size_t m, std::size_t n, std::uint64_t seed);

// Each pattern starts with a fair sign; every following element repeats its
// predecessor with probability `persistence` and flips otherwise.
PatternSet gen_correlated_patterns(std::size_t m, std::size_t n, double persistence,
                                   std::uint64_t seed);

// Flips exactly round(f * N) distinct positions chosen uniformly.
State corrupt(std::span<const std::int8_t> pattern, double flip_fraction, std::uint64_t seed);

double cosine_similarity(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

// Plain text, one pattern per line, tokens "-1"/"1" separated by single spaces.
void save_patterns(const std::filesystem::path& path, const PatternSet& patterns);
PatternSet load_patterns(const std::filesystem::path& path);

}  // namespace amem
