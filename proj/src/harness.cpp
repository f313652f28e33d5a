#include "amem/harness.hpp"

#include <algorithm>
#include <cmath>

#include "amem/cancel.hpp"
#include "amem/cmaes.hpp"
#include "amem/errors.hpp"
#include "amem/parallel.hpp"
#include "amem/rng.hpp"

namespace amem {

std::string to_string(Method m) { return m == Method::kHebbian ? "hebbian" : "infomorphic"; }

Method parse_method(std::string_view name) {
  if (name == "hebbian") return Method::kHebbian;
  if (name == "infomorphic") return Method::kInfomorphic;
  throw ParameterError("unknown method '" + std::string(name) + "' (expected hebbian or infomorphic)");
}

PatternSet make_patterns(const PatternSource& source, std::size_t m, std::size_t n, std::uint64_t seed) {
  if (source.kind == PatternSource::Kind::kCorrelated) return gen_correlated_patterns(m, n, source.persistence, seed);
  return gen_iid_patterns(m, n, seed);
}

WeightMatrix train_weights(const Trainer& trainer, const PatternSet& patterns, std::uint64_t seed) {
  if (trainer.method == Method::kHebbian) return hebbian_train(patterns);
  TrainConfig cfg = trainer.config;
  cfg.seed = seed;
  return train_infomorphic(patterns, cfg).net.w_r;
}

std::uint64_t pattern_key(std::uint64_t seed, std::size_t n, std::size_t m) {
  return Rng::derive(seed, Stream::kPatterns, {n, m}).next_u64();
}

std::uint64_t training_key(std::uint64_t seed, std::size_t n, std::size_t m) {
  return Rng::derive(seed, Stream::kInit, {n, m}).next_u64();
}

RecallStats evaluate_recall(const WeightMatrix& w, const PatternSet& patterns, double theta, double flip_fraction,
                            std::uint64_t seed, const RecallOptions& options) {
  if (patterns.size() != w.size()) throw DimensionError("evaluate_recall: pattern length does not match N");
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must be in (0, 1]");
  RecallStats s;
  s.similarity.reserve(patterns.count());
  std::size_t hits = 0;
  double total = 0.0;
  for (std::size_t p = 0; p < patterns.count(); ++p) {
    const auto xi = patterns.row(p);
    const State init = flip_fraction > 0.0 ? corrupt(xi, flip_fraction, Rng::derive(seed, Stream::kCorruption, {p}).next_u64())
                                           : State(xi.begin(), xi.end());
    const RecallResult r = recall(w, init, options);
    const double sim = cosine_similarity(r.final_state, xi);
    s.similarity.push_back(sim);
    total += sim;
    if (sim - theta >= 0.0) ++hits;
  }
  const double m = static_cast<double>(patterns.count());
  s.a_cos = total / m;
  s.a_theta = static_cast<double>(hits) / m;
  return s;
}

double accuracy_cos(const WeightMatrix& w, const PatternSet& patterns, double flip_fraction, std::uint64_t seed,
                    const RecallOptions& options) {
  return evaluate_recall(w, patterns, 0.95, flip_fraction, seed, options).a_cos;
}

double accuracy_threshold(const WeightMatrix& w, const PatternSet& patterns, double theta, double flip_fraction,
                          std::uint64_t seed, const RecallOptions& options) {
  return evaluate_recall(w, patterns, theta, flip_fraction, seed, options).a_theta;
}

double expected_constant_neurons(std::size_t n, double alpha) {
  const double an = alpha * static_cast<double>(n);
  if (!(an >= 1.0 - 1e-9)) throw ParameterError("expected_constant_neurons: alpha * N must be >= 1");
  return static_cast<double>(n) * std::exp2(1.0 - an);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DimensionError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("percentile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level, std::size_t resamples,
                                       std::uint64_t seed) {
  if (samples.size() < 2) throw DimensionError("bootstrap_ci needs at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("bootstrap_ci: level must be in (0, 1)");
  if (resamples < 1) throw ParameterError("bootstrap_ci: resamples must be >= 1");
  Rng rng = Rng::derive(seed, Stream::kBootstrap);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<double> draw(samples.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& d : draw) d = samples[rng.below(samples.size())];
    stats.push_back(median(draw));
  }
  const double tail = (1.0 - level) / 2.0;
  return {percentile(stats, tail), percentile(stats, 1.0 - tail)};
}

std::vector<double> load_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ParameterError("load grid step must be > 0");
  if (!(start > 0.0) || !(stop >= start)) throw ParameterError("load grid needs 0 < start <= stop");
  const auto first = static_cast<long long>(std::llround(start / step));
  const auto last = static_cast<long long>(std::floor(stop / step + 1e-9));
  std::vector<double> out;
  for (long long k = std::max(first, 1LL); k <= last; ++k) {
    out.push_back(std::round(static_cast<double>(k) * step * 1e9) / 1e9);
  }
  return out;
}

std::size_t patterns_at(std::size_t n, double alpha) {
  const long long m = std::llround(alpha * static_cast<double>(n));
  if (m < 1) throw ParameterError("memory load gives fewer than one pattern");
  return static_cast<std::size_t>(m);
}

CapacityScan scan_capacity(const CapacityConfig& config, std::uint64_t seed) {
  CapacityScan scan;
  scan.seed = seed;
  bool found = false;
  const std::vector<double> grid = load_grid(config.alpha_start, config.alpha_max, config.alpha_step);
  for (double alpha : grid) {
    check_cancel();
    LoadResult load;
    load.alpha = alpha;
    load.m = patterns_at(config.n, alpha);
    const PatternSet patterns = make_patterns(config.source, load.m, config.n, pattern_key(seed, config.n, load.m));
    const WeightMatrix w = train_weights(config.trainer, patterns, training_key(seed, config.n, load.m));
    const RecallStats stats = evaluate_recall(w, patterns, 0.95, 0.0, 0, config.recall);
    load.a_cos = stats.a_cos;
    load.a_theta = stats.a_theta;
    load.passed = stats.a_cos > config.threshold;
    if (!load.passed) load.excluded = expected_constant_neurons(config.n, alpha) > config.finite_size_limit;
    scan.loads.push_back(load);
    if (!load.passed && !load.excluded && !found) {
      found = true;
      scan.alpha_c = alpha;
      if (config.stop_at_failure) break;
    }
  }
  if (!found) {
    scan.censored = true;
    scan.alpha_c = grid.empty() ? config.alpha_start
                                : std::round((grid.back() + config.alpha_step) * 1e9) / 1e9;
  }
  return scan;
}

CapacityResult summarize_capacity(const CapacityConfig& config, std::vector<CapacityScan> scans) {
  if (scans.empty()) throw ParameterError("capacity needs at least one seed");
  CapacityResult r;
  for (const auto& s : scans) r.per_seed.push_back(s.alpha_c);
  r.alpha_c = median(r.per_seed);
  r.ci95 = r.per_seed.size() >= 2 ? bootstrap_ci(r.per_seed, 0.95, config.resamples, config.bootstrap_seed)
                                  : std::pair{r.alpha_c, r.alpha_c};
  r.scans = std::move(scans);
  return r;
}

CapacityResult estimate_capacity(const CapacityConfig& config, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ParameterError("capacity needs at least one seed");
  std::vector<CapacityScan> scans(seeds.size());
  parallel_for(seeds.size(), config.jobs, [&](std::size_t k) { scans[k] = scan_capacity(config, seeds[k]); });
  return summarize_capacity(config, std::move(scans));
}

std::vector<StabilityPoint> stability_profile(const StabilityConfig& config, std::span<const std::uint64_t> seeds) {
  if (config.alphas.empty() || config.flips.empty()) throw ParameterError("stability grids must be nonempty");
  for (double f : config.flips) {
    if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("flip fractions must be in [0, 1]");
  }
  const std::size_t cells = config.alphas.size() * seeds.size();
  std::vector<StabilityPoint> out(cells);
  parallel_for(cells, config.jobs, [&](std::size_t c) {
    const double alpha = config.alphas[c / seeds.size()];
    const std::uint64_t seed = seeds[c % seeds.size()];
    const std::size_t m = patterns_at(config.n, alpha);
    const PatternSet patterns = make_patterns(config.source, m, config.n, pattern_key(seed, config.n, m));
    const WeightMatrix w = train_weights(config.trainer, patterns, training_key(seed, config.n, m));
    const std::uint64_t flip_key = Rng::derive(seed, Stream::kCorruption, {config.n, m}).next_u64();
    double f_max = 0.0;
    for (double f : config.flips) {
      if (accuracy_cos(w, patterns, f, flip_key, config.recall) >= config.epsilon) f_max = std::max(f_max, f);
    }
    out[c] = {alpha, seed, f_max};
  });
  return out;
}

ProfileRow analyse_network(const WeightMatrix& w, const PatternSet& patterns, const TrainConfig& analysis,
                           double theta, const RecallOptions& options) {
  const std::size_t n = w.size();
  ProfileRow row;
  row.alpha = patterns.load();
  const RecallStats stats = evaluate_recall(w, patterns, theta, 0.0, 0, options);
  row.a_cos = stats.a_cos;
  row.a_theta = stats.a_theta;
  PidAtoms<double> sum{0, 0, 0, 0, 0};
  double h_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const NeuronOutcome o = evaluate_neuron(w.row(i), i, analysis.w_t, patterns, analysis.binning, analysis.goal);
      sum.unq_r += o.atoms.unq_r;
      sum.unq_t += o.atoms.unq_t;
      sum.red += o.atoms.red;
      sum.syn += o.atoms.syn;
      sum.res += o.atoms.res;
      h_sum += o.h_y;
      ++used;
    } catch (const NumericDomainError&) {
      ++row.skipped;
    }
  }
  if (used > 0) {
    const double inv = 1.0 / static_cast<double>(used);
    row.atoms = {sum.unq_r * inv, sum.unq_t * inv, sum.red * inv, sum.syn * inv, sum.res * inv};
    row.h_y = h_sum * inv;
  }
  return row;
}

std::vector<ProfileRow> pid_profile(const ProfileConfig& config, std::span<const std::uint64_t> seeds) {
  if (config.alphas.empty() || seeds.empty()) throw ParameterError("pid profile needs loads and seeds");
  const std::size_t cells = config.alphas.size() * seeds.size();
  std::vector<ProfileRow> out(cells);
  parallel_for(cells, config.jobs, [&](std::size_t c) {
    const double alpha = config.alphas[c / seeds.size()];
    const std::uint64_t seed = seeds[c % seeds.size()];
    const std::size_t m = patterns_at(config.n, alpha);
    const PatternSet patterns = make_patterns(config.source, m, config.n, pattern_key(seed, config.n, m));
    const WeightMatrix w = train_weights(config.trainer, patterns, training_key(seed, config.n, m));
    out[c] = analyse_network(w, patterns, config.trainer.config, config.theta, config.recall);
    out[c].alpha = alpha;
    out[c].seed = seed;
  });
  return out;
}

std::vector<ProfileBand> profile_bands(std::span<const ProfileRow> rows) {
  std::vector<double> alphas;
  for (const auto& r : rows) {
    if (std::find(alphas.begin(), alphas.end(), r.alpha) == alphas.end()) alphas.push_back(r.alpha);
  }
  std::vector<ProfileBand> bands;
  for (double alpha : alphas) {
    std::array<std::vector<double>, 5> atoms;
    std::vector<double> cos, thr;
    for (const auto& r : rows) {
      if (r.alpha != alpha) continue;
      const std::array<double, 5> a{r.atoms.unq_r, r.atoms.unq_t, r.atoms.red, r.atoms.syn, r.atoms.res};
      for (std::size_t k = 0; k < 5; ++k) atoms[k].push_back(a[k]);
      cos.push_back(r.a_cos);
      thr.push_back(r.a_theta);
    }
    ProfileBand b;
    b.alpha = alpha;
    for (std::size_t k = 0; k < 5; ++k) {
      b.median[k] = median(atoms[k]);
      b.p05[k] = percentile(atoms[k], 0.05);
      b.p95[k] = percentile(atoms[k], 0.95);
    }
    b.a_cos = median(cos);
    b.a_theta = median(thr);
    bands.push_back(b);
  }
  return bands;
}

std::vector<GoalParams> goal_grid(const std::array<std::vector<double>, 5>& axes) {
  for (const auto& a : axes) {
    if (a.empty()) throw ParameterError("goal grid axes must be nonempty");
  }
  std::vector<GoalParams> out;
  std::array<std::size_t, 5> idx{};
  while (true) {
    out.push_back(GoalParams::from_array(
        {axes[0][idx[0]], axes[1][idx[1]], axes[2][idx[2]], axes[3][idx[3]], axes[4][idx[4]]}));
    std::size_t k = 5;
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

namespace {

CapacityConfig with_goal(const CapacityConfig& base, const GoalParams& goal) {
  CapacityConfig cfg = base;
  cfg.trainer.method = Method::kInfomorphic;
  cfg.trainer.config.goal = goal;
  return cfg;
}

}  // namespace

std::vector<LandscapePoint> goal_landscape(const CapacityConfig& base, std::span<const GoalParams> goals,
                                           std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ParameterError("landscape needs at least one seed");
  const std::size_t cells = goals.size() * seeds.size();
  std::vector<CapacityScan> scans(cells);
  parallel_for(cells, base.jobs, [&](std::size_t c) {
    scans[c] = scan_capacity(with_goal(base, goals[c / seeds.size()]), seeds[c % seeds.size()]);
  });
  std::vector<LandscapePoint> out;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    std::vector<CapacityScan> mine(scans.begin() + static_cast<std::ptrdiff_t>(g * seeds.size()),
                                   scans.begin() + static_cast<std::ptrdiff_t>((g + 1) * seeds.size()));
    out.push_back({goals[g], summarize_capacity(base, std::move(mine))});
  }
  return out;
}

OptimizeResult optimize_goal(const OptimizeConfig& config) {
  OptimizeResult result;
  CmaesConfig cma;
  cma.sigma0 = config.sigma0;
  cma.budget = config.budget;
  cma.lower.assign(config.lower.begin(), config.lower.end());
  cma.upper.assign(config.upper.begin(), config.upper.end());
  cma.seed = config.search_seed;
  auto objective = [&](const std::vector<std::vector<double>>& xs) {
    std::vector<double> values(xs.size());
    parallel_for(xs.size(), config.capacity.jobs, [&](std::size_t k) {
      const GoalParams g = GoalParams::from_array({xs[k][0], xs[k][1], xs[k][2], xs[k][3], xs[k][4]});
      values[k] = scan_capacity(with_goal(config.capacity, g), config.train_seed).alpha_c;
    });
    for (std::size_t k = 0; k < xs.size(); ++k) {
      result.history.push_back({GoalParams::from_array({xs[k][0], xs[k][1], xs[k][2], xs[k][3], xs[k][4]}), values[k]});
    }
    return values;
  };
  const CmaesResult best =
      cmaes_maximize(objective, std::vector<double>(config.start.begin(), config.start.end()), cma);
  result.best = GoalParams::from_array({best.best_x[0], best.best_x[1], best.best_x[2], best.best_x[3], best.best_x[4]});
  result.search_alpha_c = best.best_f;
  if (!config.validation_seeds.empty()) {
    result.validation = estimate_capacity(with_goal(config.capacity, result.best), config.validation_seeds);
  }
  return result;
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return format_number(v); }

}  // namespace

Table capacity_table(Method method, const CapacityResult& result) {
  Table t({"method", "seed", "alpha_c"});
  for (const auto& s : result.scans) t.add_row({to_string(method), num(s.seed), num(s.alpha_c)});
  return t;
}

Table capacity_loads_table(Method method, const CapacityResult& result) {
  Table t({"method", "seed", "alpha", "m", "a_cos", "a_theta", "passed", "excluded"});
  for (const auto& s : result.scans) {
    for (const auto& l : s.loads) {
      t.add_row({to_string(method), num(s.seed), num(l.alpha), num(static_cast<std::uint64_t>(l.m)), num(l.a_cos),
                 num(l.a_theta), l.passed ? "1" : "0", l.excluded ? "1" : "0"});
    }
  }
  return t;
}

Table profile_table(std::span<const ProfileRow> rows) {
  Table t({"alpha", "seed", "a_cos", "a_theta", "unq_R", "unq_T", "red", "syn", "res"});
  for (const auto& r : rows) {
    t.add_row({num(r.alpha), num(r.seed), num(r.a_cos), num(r.a_theta), num(r.atoms.unq_r), num(r.atoms.unq_t),
               num(r.atoms.red), num(r.atoms.syn), num(r.atoms.res)});
  }
  return t;
}

Table profile_band_table(std::span<const ProfileBand> bands) {
  static const char* names[5] = {"unq_R", "unq_T", "red", "syn", "res"};
  std::vector<std::string> header{"alpha", "a_cos", "a_theta"};
  for (const char* n : names) {
    header.push_back(std::string(n) + "_median");
    header.push_back(std::string(n) + "_p05");
    header.push_back(std::string(n) + "_p95");
  }
  Table t(header);
  for (const auto& b : bands) {
    std::vector<std::string> row{num(b.alpha), num(b.a_cos), num(b.a_theta)};
    for (std::size_t k = 0; k < 5; ++k) {
      row.push_back(num(b.median[k]));
      row.push_back(num(b.p05[k]));
      row.push_back(num(b.p95[k]));
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table stability_table(std::span<const StabilityPoint> points) {
  Table t({"alpha", "seed", "f_max"});
  for (const auto& p : points) t.add_row({num(p.alpha), num(p.seed), num(p.f_max)});
  return t;
}

Table landscape_table(std::span<const LandscapePoint> points) {
  Table t({"g_unq_R", "g_unq_T", "g_red", "g_syn", "g_res", "alpha_c_median", "ci_lo", "ci_hi"});
  for (const auto& p : points) {
    t.add_row({num(p.goal.unq_r), num(p.goal.unq_t), num(p.goal.red), num(p.goal.syn), num(p.goal.res),
               num(p.capacity.alpha_c), num(p.capacity.ci95.first), num(p.capacity.ci95.second)});
  }
  return t;
}

Table optimize_history_table(std::span<const GoalEvaluation> history) {
  Table t({"evaluation", "g_unq_R", "g_unq_T", "g_red", "g_syn", "g_res", "alpha_c"});
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& h = history[k];
    t.add_row({num(static_cast<std::uint64_t>(k)), num(h.goal.unq_r), num(h.goal.unq_t), num(h.goal.red),
               num(h.goal.syn), num(h.goal.res), num(h.alpha_c)});
  }
  return t;
}

}  // namespace amem
