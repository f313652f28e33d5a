#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amem/hopfield.hpp"
#include "amem/infomorphic.hpp"
#include "amem/patterns.hpp"
#include "amem/pid.hpp"
#include "amem/table.hpp"

namespace amem {

enum class Method { kHebbian, kInfomorphic };

std::string to_string(Method m);
Method parse_method(std::string_view name);

struct PatternSource {
  enum class Kind { kIid, kCorrelated };
  Kind kind = Kind::kIid;
  double persistence = 0.5;
};

PatternSet make_patterns(const PatternSource& source, std::size_t m, std::size_t n, std::uint64_t seed);

/// How weights are obtained for one pattern set.
struct Trainer {
  Method method = Method::kHebbian;
  TrainConfig config;  // infomorphic hyperparameters; binning and w_t also drive PID analysis
};

WeightMatrix train_weights(const Trainer& trainer, const PatternSet& patterns, std::uint64_t seed);

// Keys for the pattern set and the training run of one (seed, N, m) cell.
std::uint64_t pattern_key(std::uint64_t seed, std::size_t n, std::size_t m);
std::uint64_t training_key(std::uint64_t seed, std::size_t n, std::size_t m);

struct RecallStats {
  double a_cos = 0.0;
  double a_theta = 0.0;
  std::vector<double> similarity;  // per pattern
};

// Recall from every pattern (optionally corrupted by `flip_fraction`) and
// compare the final state with the stored pattern.
RecallStats evaluate_recall(const WeightMatrix& w, const PatternSet& patterns, double theta = 0.95,
                            double flip_fraction = 0.0, std::uint64_t seed = 0, const RecallOptions& options = {});

double accuracy_cos(const WeightMatrix& w, const PatternSet& patterns, double flip_fraction = 0.0,
                    std::uint64_t seed = 0, const RecallOptions& options = {});
double accuracy_threshold(const WeightMatrix& w, const PatternSet& patterns, double theta = 0.95,
                          double flip_fraction = 0.0, std::uint64_t seed = 0, const RecallOptions& options = {});

// N / 2^(alpha N - 1): expected number of neurons whose target never changes sign.
double expected_constant_neurons(std::size_t n, double alpha);

double median(std::vector<double> values);
// Linear interpolation between order statistics, q in [0, 1].
double percentile(std::vector<double> values, double q);

// Percentile bootstrap interval of the median.
std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level = 0.95,
                                       std::size_t resamples = 10000, std::uint64_t seed = 0);

/// Memory loads k * step for k = first..last, rounded to 1e-9.
std::vector<double> load_grid(double start, double stop, double step);
std::size_t patterns_at(std::size_t n, double alpha);

struct CapacityConfig {
  Trainer trainer;
  PatternSource source;
  std::size_t n = 100;
  double alpha_step = 0.02;
  double alpha_start = 0.02;  // loads below are assumed to pass
  double alpha_max = 2.0;
  RecallOptions recall;
  double threshold = 0.95;    // a_cos must exceed this
  double finite_size_limit = 0.5;
  bool stop_at_failure = true;  // false: evaluate every load up to alpha_max
  std::size_t resamples = 10000;
  std::uint64_t bootstrap_seed = 0;
  std::size_t jobs = 1;
};

struct LoadResult {
  double alpha = 0.0;
  std::size_t m = 0;
  double a_cos = 0.0;
  double a_theta = 0.0;
  bool passed = false;
  bool excluded = false;  // failure attributed to finite size
};

struct CapacityScan {
  std::uint64_t seed = 0;
  double alpha_c = 0.0;
  bool censored = false;  // no failure up to alpha_max
  std::vector<LoadResult> loads;
};

struct CapacityResult {
  double alpha_c = 0.0;  // median over seeds
  std::vector<double> per_seed;
  std::pair<double, double> ci95{0.0, 0.0};
  std::vector<CapacityScan> scans;
};

// Scans loads upward; alpha_c is the first load that fails (ignoring
// finite-size failures), so every smaller load passed.
CapacityScan scan_capacity(const CapacityConfig& config, std::uint64_t seed);
CapacityResult summarize_capacity(const CapacityConfig& config, std::vector<CapacityScan> scans);
CapacityResult estimate_capacity(const CapacityConfig& config, std::span<const std::uint64_t> seeds);

struct StabilityConfig {
  Trainer trainer;
  PatternSource source;
  std::size_t n = 100;
  std::vector<double> alphas;
  std::vector<double> flips;
  RecallOptions recall;
  double epsilon = 0.95;
  std::size_t jobs = 1;
};

struct StabilityPoint {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double f_max = 0.0;
};

std::vector<StabilityPoint> stability_profile(const StabilityConfig& config, std::span<const std::uint64_t> seeds);

struct ProfileConfig {
  Trainer trainer;
  PatternSource source;
  std::size_t n = 100;
  std::vector<double> alphas;
  RecallOptions recall;
  double theta = 0.95;
  std::size_t jobs = 1;
};

struct ProfileRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double a_cos = 0.0;
  double a_theta = 0.0;
  PidAtoms<double> atoms{};  // mean over analysed neurons
  double h_y = 0.0;
  std::size_t skipped = 0;
};

struct ProfileBand {
  double alpha = 0.0;
  std::array<double, 5> median{};  // unq_R, unq_T, red, syn, res
  std::array<double, 5> p05{};
  std::array<double, 5> p95{};
  double a_cos = 0.0;
  double a_theta = 0.0;
};

// Mean PID atoms of every neuron of a trained network, with r the drive from
// the stored pattern and t = w_t * xi_i.
ProfileRow analyse_network(const WeightMatrix& w, const PatternSet& patterns, const TrainConfig& analysis,
                           double theta, const RecallOptions& options = {});

std::vector<ProfileRow> pid_profile(const ProfileConfig& config, std::span<const std::uint64_t> seeds);
std::vector<ProfileBand> profile_bands(std::span<const ProfileRow> rows);

struct LandscapePoint {
  GoalParams goal;
  CapacityResult capacity;
};

// Cartesian product of per-coefficient value lists, order (unq_R, unq_T, red, syn, res).
std::vector<GoalParams> goal_grid(const std::array<std::vector<double>, 5>& axes);

std::vector<LandscapePoint> goal_landscape(const CapacityConfig& base, std::span<const GoalParams> goals,
                                           std::span<const std::uint64_t> seeds);

struct OptimizeConfig {
  CapacityConfig capacity;
  std::size_t budget = 200;
  double sigma0 = 0.3;
  std::array<double, 5> lower{-1, -1, -1, -1, -1};
  std::array<double, 5> upper{1, 1, 1, 1, 1};
  std::array<double, 5> start{0, 0, 1, 0, 0};
  std::uint64_t search_seed = 0;
  std::uint64_t train_seed = 0;
  std::vector<std::uint64_t> validation_seeds;
};

struct GoalEvaluation {
  GoalParams goal;
  double alpha_c = 0.0;
};

struct OptimizeResult {
  GoalParams best;
  double search_alpha_c = 0.0;
  CapacityResult validation;
  std::vector<GoalEvaluation> history;
};

OptimizeResult optimize_goal(const OptimizeConfig& config);

Table capacity_table(Method method, const CapacityResult& result);
Table capacity_loads_table(Method method, const CapacityResult& result);
Table profile_table(std::span<const ProfileRow> rows);
Table profile_band_table(std::span<const ProfileBand> bands);
Table stability_table(std::span<const StabilityPoint> points);
Table landscape_table(std::span<const LandscapePoint> points);
Table optimize_history_table(std::span<const GoalEvaluation> history);

}  // namespace amem
