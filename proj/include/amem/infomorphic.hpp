#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "amem/autodiff.hpp"
#include "amem/hopfield.hpp"
#include "amem/optim.hpp"
#include "amem/patterns.hpp"
#include "amem/pid.hpp"
#include "amem/soft_binning.hpp"

namespace amem {

inline constexpr double kDefaultTargetWeight = 2.3;

struct TrainConfig {
  std::size_t epochs = 5000;
  std::size_t reps = 1;
  double eta = 0.05;
  double lambda_r = 1e-3;
  double w_t = kDefaultTargetWeight;
  GoalParams goal = GoalParams::redundancy();
  BinningConfig binning;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  // Differentiate through the soft-bin weights as well as the conditionals.
  // Off: p(r, t) is held fixed within each step and only sigma(r + t) carries gradient.
  bool bin_gradient = false;

  void validate() const;
};

/// Recurrent weights (zero diagonal, trained) plus one frozen target weight per neuron.
struct InfomorphicNetwork {
  WeightMatrix w_r;
  std::vector<double> w_t;

  std::size_t size() const { return w_r.size(); }
};

// w_R ~ N(0, lambda_r * sqrt(2 / N)) off the diagonal, w_T = w_t everywhere.
InfomorphicNetwork init_network(std::size_t n, double lambda_r, std::uint64_t seed,
                                double w_t = kDefaultTargetWeight);

/// One training-time step from a pattern: drives, firing probabilities and
/// sampled bipolar outputs for every neuron.
struct ForwardPass {
  std::vector<double> r;
  std::vector<double> t;
  std::vector<double> p_plus;  // sigma(r + t)
  State y;
};

ForwardPass forward_train(const InfomorphicNetwork& net, std::span<const std::int8_t> pattern,
                          std::uint64_t seed);

/// One neuron's inputs and output conditionals over all patterns.
template <ad::Scalar T>
struct NeuronSampleSet {
  std::vector<T> r;
  std::vector<double> t;
  std::vector<T> p_plus;
  std::vector<T> p_minus;
};

/// r_p = sum_{j != i} w_ij xi_j^(p), t_p = w_t xi_i^(p), p_plus = sigma(r_p + t_p).
template <ad::Scalar T>
NeuronSampleSet<T> neuron_samples(std::span<const T> row, std::size_t neuron, double w_t,
                                  const PatternSet& patterns) {
  const std::size_t n = patterns.size();
  if (row.size() != n) throw DimensionError("neuron_samples: weight row length does not match N");
  NeuronSampleSet<T> s;
  const std::size_t m = patterns.count();
  s.r.reserve(m);
  s.t.reserve(m);
  s.p_plus.reserve(m);
  s.p_minus.reserve(m);
  std::vector<double> coeff(n);
  for (std::size_t p = 0; p < m; ++p) {
    auto xi = patterns.row(p);
    for (std::size_t j = 0; j < n; ++j) coeff[j] = j == neuron ? 0.0 : static_cast<double>(xi[j]);
    T r = ad::weighted_sum(std::span<const double>(coeff), row);
    const double t = w_t * xi[neuron];
    const T x = r + t;
    s.p_plus.push_back(ad::sigmoid(x));
    s.p_minus.push_back(ad::sigmoid(-x));
    s.r.push_back(std::move(r));
    s.t.push_back(t);
  }
  return s;
}

namespace detail {

template <ad::Scalar T, ad::Scalar W>
JointDistribution<T> assemble_joint(const NeuronSampleSet<T>& s, const std::vector<std::vector<W>>& wr,
                                    const std::vector<double>& wt, std::size_t n_r, std::size_t n_t) {
  const std::size_t m = s.r.size();
  std::vector<T> mass(2 * n_r * n_t, s.p_plus[0]);
  std::vector<double> coeff(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  if constexpr (std::is_same_v<W, double>) {
    for (std::size_t a = 0; a < n_r; ++a) {
      for (std::size_t b = 0; b < n_t; ++b) {
        for (std::size_t p = 0; p < m; ++p) coeff[p] = wr[p][a] * wt[p * n_t + b] * inv_m;
        const std::span<const double> c(coeff);
        mass[(0 * n_r + a) * n_t + b] = ad::weighted_sum(c, std::span<const T>(s.p_minus));
        mass[(1 * n_r + a) * n_t + b] = ad::weighted_sum(c, std::span<const T>(s.p_plus));
      }
    }
  } else {
    std::vector<T> column;
    column.reserve(m);
    for (std::size_t a = 0; a < n_r; ++a) {
      column.clear();
      for (std::size_t p = 0; p < m; ++p) column.push_back(wr[p][a]);
      for (std::size_t b = 0; b < n_t; ++b) {
        for (std::size_t p = 0; p < m; ++p) coeff[p] = wt[p * n_t + b] * inv_m;
        const std::span<const double> c(coeff);
        mass[(0 * n_r + a) * n_t + b] = ad::weighted_inner(c, std::span<const T>(column), std::span<const T>(s.p_minus));
        mass[(1 * n_r + a) * n_t + b] = ad::weighted_inner(c, std::span<const T>(column), std::span<const T>(s.p_plus));
      }
    }
  }
  return JointDistribution<T>(n_r, n_t, std::move(mass));
}

template <ad::Scalar W>
std::vector<std::vector<W>> r_weights(std::span<const W> r, const BinGrid<W>& grid, double sigma) {
  const AxisKernel<W> kr(grid.r, sigma);
  std::vector<std::vector<W>> wr(r.size(), std::vector<W>(grid.r.count, r[0]));
  for (std::size_t p = 0; p < r.size(); ++p) kr.weights(r[p], wr[p]);
  return wr;
}

inline std::vector<double> t_weights(std::span<const double> t, const BinAxis<double>& axis, double sigma) {
  const AxisKernel<double> kt(axis, sigma);
  std::vector<double> wt(t.size() * axis.count);
  for (std::size_t p = 0; p < t.size(); ++p) kt.weights(t[p], std::span<double>(wt.data() + p * axis.count, axis.count));
  return wt;
}

}  // namespace detail

/// p(y, r_bin, t_bin): per-sample normalized soft-bin weights times the
/// sample's analytic output conditional, averaged over samples.
/// With `bin_r` given, samples are binned at those coordinates instead of
/// at s.r, so p(r, t) carries no gradient.
template <ad::Scalar T>
JointDistribution<T> estimate_joint(const NeuronSampleSet<T>& s, const BinningConfig& config,
                                    std::span<const double> bin_r = {}) {
  const std::size_t m = s.r.size();
  if (m == 0) throw DimensionError("estimate_joint: no samples");
  if (!bin_r.empty()) {
    if (bin_r.size() != m) throw DimensionError("estimate_joint: bin coordinates do not match samples");
    const BinGrid<double> grid = fit_grid<double>(bin_r, s.t, config);
    return detail::assemble_joint(s, detail::r_weights<double>(bin_r, grid, config.sigma_r),
                                  detail::t_weights(s.t, grid.t, config.sigma_t), grid.r.count, grid.t.count);
  }
  const BinGrid<T> grid = fit_grid<T>(s.r, s.t, config);
  return detail::assemble_joint(s, detail::r_weights<T>(s.r, grid, config.sigma_r),
                                detail::t_weights(s.t, grid.t, config.sigma_t), grid.r.count, grid.t.count);
}

/// Goal and PID decomposition of one neuron for a given incoming weight row.
struct NeuronOutcome {
  PidAtoms<double> atoms{};
  double h_y = 0.0;
  double goal = 0.0;
  bool skipped = false;
  std::string diagnostic;
};

// Plain evaluation of one neuron (no tape). Throws NumericDomainError on degenerate joints.
NeuronOutcome evaluate_neuron(std::span<const double> row, std::size_t neuron, double w_t,
                              const PatternSet& patterns, const BinningConfig& binning, const GoalParams& goal);

// Goal value only; the objective used for finite-difference validation.
// A non-empty `bin_row` fixes the binning coordinates to those produced by that row.
double neuron_goal(std::span<const double> row, std::size_t neuron, double w_t, const PatternSet& patterns,
                   const BinningConfig& binning, const GoalParams& goal, std::span<const double> bin_row = {});

// Goal, atoms and dG/dw_i. for one neuron, recorded on `tape` (cleared first).
NeuronOutcome neuron_gradient(std::span<const double> row, std::size_t neuron, double w_t,
                              const PatternSet& patterns, const BinningConfig& binning, const GoalParams& goal,
                              bool bin_gradient, ad::Tape& tape, std::vector<double>& gradient);

struct EpochReport {
  std::vector<NeuronOutcome> neurons;
  PidAtoms<double> mean_atoms{};
  double mean_goal = 0.0;
  std::size_t skipped = 0;
  // Fraction of sampled training outputs equal to their target element.
  double sampled_agreement = 0.0;
};

/// Optimizer state carried across epochs: one Adam state per neuron row.
struct TrainerState {
  std::vector<AdamState> adam;
  std::size_t epochs_done = 0;

  static TrainerState fresh(std::size_t n, const AdamConfig& cfg);
};

// One pass: every neuron builds its joint from all patterns, evaluates G and
// takes one Adam ascent step on its own row. w_T and diag(w_R) are untouched.
EpochReport train_epoch(InfomorphicNetwork& net, const PatternSet& patterns, const TrainConfig& config,
                        TrainerState& state);

struct EpochTelemetry {
  std::size_t epoch = 0;
  PidAtoms<double> mean_atoms{};
  double mean_goal = 0.0;
  std::size_t skipped = 0;
  double sampled_agreement = 0.0;
};

struct TrainResult {
  InfomorphicNetwork net;
  std::vector<EpochTelemetry> telemetry;
};

using EpochCallback = std::function<void(const EpochTelemetry&)>;

TrainResult train(InfomorphicNetwork net, const PatternSet& patterns, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Initializes from config.seed and trains; the usual entry point.
TrainResult train_infomorphic(const PatternSet& patterns, const TrainConfig& config,
                              const EpochCallback& on_epoch = {});

}  // namespace amem
