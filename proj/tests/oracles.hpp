#pragma once

// Independent reference implementations used by unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "amem/patterns.hpp"
#include "amem/pid.hpp"
#include "amem/rng.hpp"
#include "amem/soft_binning.hpp"

namespace amem::oracle {

inline JointDistribution<double> random_positive_joint(Rng& rng, std::size_t n_r, std::size_t n_t,
                                                       double floor = 1e-3) {
  std::vector<double> p(2 * n_r * n_t);
  double total = 0.0;
  for (double& x : p) {
    x = floor + rng.uniform();
    total += x;
  }
  for (double& x : p) x /= total;
  return JointDistribution<double>(n_r, n_t, std::move(p));
}

// Y = R = T, one fair bit.
inline JointDistribution<double> copy_joint() {
  std::vector<double> p(8, 0.0);
  p[(0 * 2 + 0) * 2 + 0] = 0.5;
  p[(1 * 2 + 1) * 2 + 1] = 0.5;
  return JointDistribution<double>(2, 2, std::move(p));
}

// Y = R xor T with independent fair bits.
inline JointDistribution<double> xor_joint() {
  std::vector<double> p(8, 0.0);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) p[((a ^ b) * 2 + a) * 2 + b] = 0.25;
  }
  return JointDistribution<double>(2, 2, std::move(p));
}

// Does cell (a2, b2) belong to the event the antichain induces at realization (a, b)?
inline bool in_event(Antichain beta, std::size_t a, std::size_t b, std::size_t a2, std::size_t b2) {
  switch (beta) {
    case Antichain::kRedundancy:
      return a2 == a || b2 == b;
    case Antichain::kR:
      return a2 == a;
    case Antichain::kT:
      return b2 == b;
    case Antichain::kRT:
      return a2 == a && b2 == b;
  }
  return false;
}

// Sum over realizations of p(y,a,b) log2 p(y | E) / p(y), enumerating the event
// cells explicitly.
inline double brute_isx(const JointDistribution<double>& j, Antichain beta) {
  const std::size_t nr = j.n_r(), nt = j.n_t();
  double py[2] = {0.0, 0.0};
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t a = 0; a < nr; ++a) {
      for (std::size_t b = 0; b < nt; ++b) py[y] += j(y, a, b);
    }
  }
  double total = 0.0;
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t a = 0; a < nr; ++a) {
      for (std::size_t b = 0; b < nt; ++b) {
        const double p = j(y, a, b);
        if (p == 0.0) continue;
        double joint_e = 0.0, mass_e = 0.0;
        for (std::size_t a2 = 0; a2 < nr; ++a2) {
          for (std::size_t b2 = 0; b2 < nt; ++b2) {
            if (!in_event(beta, a, b, a2, b2)) continue;
            joint_e += j(y, a2, b2);
            mass_e += j(0, a2, b2) + j(1, a2, b2);
          }
        }
        total += p * std::log2((joint_e / mass_e) / py[y]);
      }
    }
  }
  return total;
}

inline double brute_entropy_y(const JointDistribution<double>& j) {
  double h = 0.0;
  for (std::size_t y = 0; y < 2; ++y) {
    double p = 0.0;
    for (std::size_t a = 0; a < j.n_r(); ++a) {
      for (std::size_t b = 0; b < j.n_t(); ++b) p += j(y, a, b);
    }
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// Hard 2D histogram on the same grid: each sample adds 1/m to the cell containing it.
inline std::vector<double> hard_histogram(const std::vector<double>& r, const std::vector<double>& t,
                                          const BinGrid<double>& grid) {
  std::vector<double> h(grid.r.count * grid.t.count, 0.0);
  for (std::size_t p = 0; p < r.size(); ++p) {
    const auto a = static_cast<std::size_t>(std::floor((r[p] - grid.r.lo) / grid.r.width));
    const auto b = static_cast<std::size_t>(std::floor((t[p] - grid.t.lo) / grid.t.width));
    h[a * grid.t.count + b] += 1.0 / static_cast<double>(r.size());
  }
  return h;
}

struct MonteCarlo {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Number of neurons whose element is identical across all m patterns.
inline MonteCarlo constant_neurons(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const PatternSet p = gen_iid_patterns(m, n, Rng::derive(seed, Stream::kPatterns, {n, m, k}).next_u64());
    double count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      bool same = true;
      for (std::size_t q = 1; q < m && same; ++q) same = p(q, i) == p(0, i);
      count += same ? 1.0 : 0.0;
    }
    sum += count;
    sum2 += count * count;
  }
  const double t = static_cast<double>(trials);
  const double mean = sum / t;
  const double var = std::max(0.0, (sum2 - t * mean * mean) / (t - 1.0));
  return {mean, std::sqrt(var / t)};
}

}  // namespace amem::oracle
