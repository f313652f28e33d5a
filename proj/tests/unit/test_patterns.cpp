#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "amem/errors.hpp"
#include "amem/patterns.hpp"

using namespace amem;
namespace fs = std::filesystem;

TEST_CASE("iid patterns are bipolar, seeded and balanced") {
  const PatternSet a = gen_iid_patterns(200, 50, 7);
  CHECK(a.count() == 200);
  CHECK(a.size() == 50);
  CHECK(a == gen_iid_patterns(200, 50, 7));
  CHECK_FALSE(a == gen_iid_patterns(200, 50, 8));
  double sum = 0.0;
  for (std::int8_t x : a.data()) {
    REQUIRE((x == 1 || x == -1));
    sum += x;
  }
  // mean of 10^4 fair signs: standard error 0.01
  CHECK(std::fabs(sum / 10000.0) < 0.05);
}

TEST_CASE("correlated patterns repeat the previous element with the given persistence") {
  for (double q : {0.0, 0.3, 0.8}) {
    const PatternSet p = gen_correlated_patterns(100, 101, q, 3);
    double repeats = 0.0;
    for (std::size_t k = 0; k < p.count(); ++k) {
      for (std::size_t i = 1; i < p.size(); ++i) repeats += p(k, i) == p(k, i - 1) ? 1.0 : 0.0;
    }
    const double frac = repeats / 10000.0;
    const double se = std::sqrt(q * (1 - q) / 10000.0);
    CHECK(std::fabs(frac - q) <= 5 * se + 1e-12);
  }
  const PatternSet constant = gen_correlated_patterns(10, 20, 1.0, 1);
  for (std::size_t k = 0; k < 10; ++k) {
    for (std::size_t i = 1; i < 20; ++i) CHECK(constant(k, i) == constant(k, 0));
  }
  CHECK_THROWS_AS(gen_correlated_patterns(2, 4, 1.5, 0), ParameterError);
}

TEST_CASE("corruption flips exactly round(f N) distinct positions") {
  const PatternSet p = gen_iid_patterns(1, 40, 1);
  for (double f : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const State c = corrupt(p.row(0), f, seed);
      int diff = 0;
      for (std::size_t i = 0; i < 40; ++i) diff += c[i] != p(0, i);
      CHECK(diff == std::lround(f * 40));
    }
  }
  CHECK(corrupt(p.row(0), 0.3, 5) == corrupt(p.row(0), 0.3, 5));
  CHECK_THROWS_AS(corrupt(p.row(0), -0.1, 0), ParameterError);
}

TEST_CASE("cosine similarity of bipolar vectors") {
  const PatternSet p = gen_iid_patterns(2, 30, 2);
  CHECK(cosine_similarity(p.row(0), p.row(0)) == doctest::Approx(1.0));
  const State neg = corrupt(p.row(0), 1.0, 0);
  CHECK(cosine_similarity(p.row(0), neg) == doctest::Approx(-1.0));
  const State one = corrupt(p.row(0), 0.1, 0);
  CHECK(cosine_similarity(p.row(0), one) == doctest::Approx(1.0 - 2.0 * 3.0 / 30.0));
}

TEST_CASE("pattern files round-trip and reject malformed input") {
  const fs::path dir = fs::temp_directory_path() / "amem-test-patterns";
  fs::create_directories(dir);
  const PatternSet p = gen_iid_patterns(7, 13, 4);
  save_patterns(dir / "p.txt", p);
  CHECK(load_patterns(dir / "p.txt") == p);

  std::ofstream(dir / "bad_value.txt") << "1 -1 0\n";
  CHECK_THROWS_AS(load_patterns(dir / "bad_value.txt"), FormatError);
  std::ofstream(dir / "ragged.txt") << "1 -1 1\n1 1\n";
  CHECK_THROWS_AS(load_patterns(dir / "ragged.txt"), FormatError);
  CHECK_THROWS(load_patterns(dir / "missing.txt"));
  fs::remove_all(dir);
}

TEST_CASE("pattern set dimensions are checked") {
  CHECK_THROWS_AS(PatternSet(2, 3, std::vector<std::int8_t>(5, 1)), DimensionError);
  CHECK_THROWS_AS(gen_iid_patterns(0, 3, 0), DimensionError);
}
