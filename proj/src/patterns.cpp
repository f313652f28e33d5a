#include "amem/patterns.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "amem/errors.hpp"
#include "amem/rng.hpp"

namespace amem {

namespace {

void check_dims(std::size_t m, std::size_t n) {
  if (m < 1 || n < 2) {
    throw DimensionError("pattern set needs m >= 1 and N >= 2, got m=" + std::to_string(m) +
                         ", N=" + std::to_string(n));
  }
}

}  // namespace

PatternSet::PatternSet(std::size_t m, std::size_t n) : PatternSet(m, n, std::vector<std::int8_t>(m * n, 1)) {}

PatternSet::PatternSet(std::size_t m, std::size_t n, std::vector<std::int8_t> data)
    : m_(m), n_(n), data_(std::move(data)) {
  check_dims(m, n);
  if (data_.size() != m * n) throw DimensionError("pattern data size does not match m*N");
  for (std::int8_t v : data_) {
    if (v != 1 && v != -1) throw ParameterError("pattern entries must be -1 or +1");
  }
}

State PatternSet::pattern(std::size_t p) const {
  auto r = row(p);
  return State(r.begin(), r.end());
}

PatternSet gen_iid_patterns(std::size_t m, std::size_t n, std::uint64_t seed) {
  check_dims(m, n);
  Rng rng = Rng::derive(seed, Stream::kPatterns);
  std::vector<std::int8_t> data(m * n);
  for (auto& v : data) v = static_cast<std::int8_t>(rng.sign());
  return PatternSet(m, n, std::move(data));
}

PatternSet gen_correlated_patterns(std::size_t m, std::size_t n, double persistence,
                                   std::uint64_t seed) {
  check_dims(m, n);
  if (!(persistence >= 0.0 && persistence <= 1.0)) {
    throw ParameterError("persistence must lie in [0, 1]");
  }
  Rng rng = Rng::derive(seed, Stream::kPatterns, {1});
  std::vector<std::int8_t> data(m * n);
  for (std::size_t p = 0; p < m; ++p) {
    std::int8_t* row = data.data() + p * n;
    row[0] = static_cast<std::int8_t>(rng.sign());
    for (std::size_t i = 1; i < n; ++i) {
      row[i] = rng.bernoulli(persistence) ? row[i - 1] : static_cast<std::int8_t>(-row[i - 1]);
    }
  }
  return PatternSet(m, n, std::move(data));
}

State corrupt(std::span<const std::int8_t> pattern, double flip_fraction, std::uint64_t seed) {
  if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
    throw ParameterError("flip fraction must lie in [0, 1]");
  }
  const std::size_t n = pattern.size();
  const auto flips = static_cast<std::size_t>(std::lround(flip_fraction * static_cast<double>(n)));
  State out(pattern.begin(), pattern.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::derive(seed, Stream::kCorruption);
  // partial Fisher-Yates: the first `flips` slots are a uniform sample without replacement
  for (std::size_t k = 0; k < flips; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(order[k], order[j]);
    out[order[k]] = static_cast<std::int8_t>(-out[order[k]]);
  }
  return out;
}

double cosine_similarity(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_similarity: length mismatch");
  if (a.empty()) throw DimensionError("cosine_similarity: empty vectors");
  long dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return static_cast<double>(dot) / static_cast<double>(a.size());
}

void save_patterns(const std::filesystem::path& path, const PatternSet& patterns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open pattern file for writing: " + path.string());
  for (std::size_t p = 0; p < patterns.count(); ++p) {
    auto row = patterns.row(p);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << (row[i] > 0 ? "1" : "-1");
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing pattern file: " + path.string());
}

PatternSet load_patterns(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open pattern file: " + path.string());
  std::vector<std::int8_t> data;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(' ', pos);
      if (next == std::string::npos) next = line.size();
      const std::string_view token(line.data() + pos, next - pos);
      if (token == "1") {
        data.push_back(1);
      } else if (token == "-1") {
        data.push_back(-1);
      } else {
        throw FormatError("pattern file line " + std::to_string(m + 1) + ": invalid token '" +
                          std::string(token) + "'");
      }
      ++count;
      pos = next + 1;
    }
    if (m == 0) {
      n = count;
    } else if (count != n) {
      throw FormatError("pattern file line " + std::to_string(m + 1) + ": expected " +
                        std::to_string(n) + " entries, got " + std::to_string(count));
    }
    ++m;
  }
  if (m == 0) throw FormatError("pattern file is empty: " + path.string());
  return PatternSet(m, n, std::move(data));
}

}  // namespace amem
