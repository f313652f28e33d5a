#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <span>
#include <vector>

#include "amem/autodiff.hpp"
#include "amem/errors.hpp"

namespace amem {

struct BinningConfig {
  std::size_t n_r = 60;
  std::size_t n_t = 2;
  double sigma_r = 0.5;   // kernel width as a fraction of the recurrent bin width
  double sigma_t = 1e-6;  // kernel width as a fraction of the target bin width
  double padding = 1.0;   // range extension on each side, in raw bin widths

  void validate() const {
    if (n_r < 1 || n_t < 1) throw ParameterError("bin counts must be >= 1");
    if (!(sigma_r > 0.0) || !(sigma_t > 0.0)) throw ParameterError("kernel widths must be > 0");
    if (!(padding >= 0.0)) throw ParameterError("padding must be >= 0");
  }

  friend bool operator==(const BinningConfig&, const BinningConfig&) = default;
};

// Minimum span imposed on an axis whose samples are all identical.
inline constexpr double kMinAxisSpan = 1e-6;

template <ad::Scalar T>
struct BinAxis {
  T lo;
  T width;  // bin side length
  std::size_t count = 1;

  T hi() const { return lo + width * static_cast<double>(count); }
};

template <ad::Scalar T>
struct BinGrid {
  BinAxis<T> r;
  BinAxis<double> t;
};

namespace detail {

template <ad::Scalar T>
T constant_like(const T& ref, double v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return ad::Var(*ref.tape(), v);
  }
}

}  // namespace detail

/// Range [min - padding*c, max + padding*c] with c = (max - min) / count, split
/// into `count` equal bins.
template <ad::Scalar T>
BinAxis<T> fit_axis(std::span<const T> samples, std::size_t count, double padding) {
  if (samples.empty()) throw DimensionError("fit_axis: no samples");
  if (count < 1) throw ParameterError("fit_axis: bin count must be >= 1");
  const T* mn = &samples[0];
  const T* mx = &samples[0];
  for (const T& s : samples) {
    if (ad::value_of(s) < ad::value_of(*mn)) mn = &s;
    if (ad::value_of(s) > ad::value_of(*mx)) mx = &s;
  }
  const double n = static_cast<double>(count);
  if (ad::value_of(*mx) - ad::value_of(*mn) < kMinAxisSpan) {
    const T mid = (*mn + *mx) * 0.5;
    const double raw = kMinAxisSpan / n;
    return {mid - (0.5 * kMinAxisSpan + padding * raw),
            detail::constant_like(mid, (kMinAxisSpan + 2.0 * padding * raw) / n), count};
  }
  const T span = *mx - *mn;
  const T raw = span / n;
  return {*mn - raw * padding, (span + raw * (2.0 * padding)) / n, count};
}

template <ad::Scalar T>
BinGrid<T> fit_grid(std::span<const T> samples_r, std::span<const double> samples_t,
                    const BinningConfig& config) {
  config.validate();
  if (samples_r.size() != samples_t.size()) throw DimensionError("fit_grid: r and t sample counts differ");
  return {fit_axis<T>(samples_r, config.n_r, config.padding),
          fit_axis<double>(samples_t, config.n_t, config.padding)};
}

/// Kernel quantities shared by every sample on one axis.
template <ad::Scalar T>
struct AxisKernel {
  BinAxis<T> axis;
  double sigma_fraction;
  std::vector<T> centers;
  T half_width;
  T inv_length;  // 1 / (sigma * width)

  AxisKernel(const BinAxis<T>& ax, double sigma)
      : axis(ax), sigma_fraction(sigma), half_width(ax.width * 0.5), inv_length(1.0 / (ax.width * sigma)) {
    centers.reserve(axis.count);
    for (std::size_t b = 0; b < axis.count; ++b) {
      centers.push_back(axis.lo + axis.width * (static_cast<double>(b) + 0.5));
    }
  }

  // Per-sample normalized weights sigma((c/2 - |x - center_b|) / l) / sum,
  // built from elementary operations only.
  void weights_composed(const T& x, std::span<T> out) const {
    std::vector<T> k;
    k.reserve(centers.size());
    for (const T& c : centers) k.push_back(ad::sigmoid((half_width - ad::abs(x - c)) * inv_length));
    const T total = ad::sum(std::span<const T>(k));
    for (std::size_t b = 0; b < k.size(); ++b) out[b] = k[b] / total;
  }

  void weights(const T& x, std::span<T> out) const {
    if constexpr (std::is_same_v<T, double>) {
      weights_composed(x, out);
    } else {
      weights_fused(x, out);
    }
  }

 private:
  // One tape node per bin with partials on (x, lo, width) only.
  void weights_fused(const T& x, std::span<T> out) const
    requires std::is_same_v<T, ad::Var>
  {
    const std::size_t n = axis.count;
    const double xv = x.value();
    const double lo = axis.lo.value();
    const double w = axis.width.value();
    const double h = 0.5 * w;
    const double u = 1.0 / (sigma_fraction * w);
    thread_local std::vector<double> k, dk_dx, dk_dw;
    k.resize(n);
    dk_dx.resize(n);
    dk_dw.resize(n);
    double total = 0.0, dtotal_dx = 0.0, dtotal_dw = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const double offset = static_cast<double>(b) + 0.5;
      const double diff = xv - (lo + offset * w);
      const double sgn = diff < 0.0 ? -1.0 : 1.0;
      const double d = std::fabs(diff);
      const double z = (h - d) * u;
      const double sp = ad::sigmoid(z);
      const double slope = sp * ad::sigmoid(-z) * u;
      k[b] = sp;
      dk_dx[b] = -sgn * slope;
      dk_dw[b] = slope * (0.5 + sgn * offset - (h - d) / w);
      total += sp;
      dtotal_dx += dk_dx[b];
      dtotal_dw += dk_dw[b];
    }
    // d k_b / d lo = -d k_b / d x, so the lo partial is the negated x partial.
    ad::Tape* tape = x.tape();
    const double inv_total = 1.0 / total;
    for (std::size_t b = 0; b < n; ++b) {
      const double omega = k[b] * inv_total;
      const double g_x = (dk_dx[b] - omega * dtotal_dx) * inv_total;
      const double g_w = (dk_dw[b] - omega * dtotal_dw) * inv_total;
      tape->add(x.index(), g_x);
      tape->add(axis.lo.index(), -g_x);
      tape->add(axis.width.index(), g_w);
      out[b] = ad::Var::from_node(tape, tape->finish(omega), omega);
    }
  }
};

/// Normalized weights of one sample over the n_r x n_t grid, row-major in
/// (r_bin, t_bin). The product kernel factorizes, so the full normalization
/// equals the product of the per-axis normalizations.
template <ad::Scalar T>
std::vector<T> soft_weights(const T& r, double t, const BinGrid<T>& grid, const BinningConfig& config) {
  const AxisKernel<T> kr(grid.r, config.sigma_r);
  const AxisKernel<double> kt(grid.t, config.sigma_t);
  std::vector<T> wr(grid.r.count, detail::constant_like(r, 0.0));
  std::vector<double> wt(grid.t.count, 0.0);
  kr.weights(r, wr);
  kt.weights(t, wt);
  std::vector<T> out;
  out.reserve(wr.size() * wt.size());
  for (const T& a : wr) {
    for (double b : wt) out.push_back(a * b);
  }
  return out;
}

/// Average of the per-sample normalized weights; p(r_bin, t_bin) row-major.
template <ad::Scalar T>
std::vector<T> soft_histogram(std::span<const T> samples_r, std::span<const double> samples_t,
                              const BinGrid<T>& grid, const BinningConfig& config) {
  if (samples_r.empty()) throw DimensionError("soft_histogram: no samples");
  if (samples_r.size() != samples_t.size()) throw DimensionError("soft_histogram: r and t sample counts differ");
  const std::size_t m = samples_r.size();
  const AxisKernel<T> kr(grid.r, config.sigma_r);
  const AxisKernel<double> kt(grid.t, config.sigma_t);
  std::vector<std::vector<T>> wr(m, std::vector<T>(grid.r.count, detail::constant_like(samples_r[0], 0.0)));
  std::vector<std::vector<double>> wt(m, std::vector<double>(grid.t.count, 0.0));
  for (std::size_t p = 0; p < m; ++p) {
    kr.weights(samples_r[p], wr[p]);
    kt.weights(samples_t[p], wt[p]);
  }
  std::vector<T> hist;
  hist.reserve(grid.r.count * grid.t.count);
  std::vector<T> column(m, detail::constant_like(samples_r[0], 0.0));
  std::vector<double> coeff(m);
  for (std::size_t a = 0; a < grid.r.count; ++a) {
    for (std::size_t p = 0; p < m; ++p) column[p] = wr[p][a];
    for (std::size_t b = 0; b < grid.t.count; ++b) {
      for (std::size_t p = 0; p < m; ++p) coeff[p] = wt[p][b] / static_cast<double>(m);
      hist.push_back(ad::weighted_sum(std::span<const double>(coeff), std::span<const T>(column)));
    }
  }
  return hist;
}

}  // namespace amem
