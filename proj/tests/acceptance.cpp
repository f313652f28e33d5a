// Acceptance suite: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amem/cli.hpp"
#include "amem/cmaes.hpp"
#include "amem/harness.hpp"
#include "amem/infomorphic.hpp"
#include "amem/optim.hpp"
#include "amem/pid.hpp"
#include "amem/soft_binning.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace amem;

namespace {

struct Context {
  std::size_t jobs = 1;
  bool extended = false;
  fs::path workdir;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// PID consistency, five-way sum, self-redundancy and R/T symmetry.
Outcome pid_consistency(const Context&) {
  constexpr double kTol = 1e-10;
  Rng rng = Rng::derive(1, Stream::kSampling, {1});
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto j = oracle::random_positive_joint(rng, 8, 2);
    const PidReport<double> rep = pid_report(j);
    const PidAtoms<double>& a = rep.atoms;
    const double mi_r = mutual_information(j, SourceSet::kR);
    const double mi_t = mutual_information(j, SourceSet::kT);
    const double mi_rt = mutual_information(j, SourceSet::kRT);
    const PidAtoms<double> s = pid_atoms(j.swapped_sources());
    const double errs[] = {
        std::fabs(a.red + a.unq_r - mi_r),
        std::fabs(a.red + a.unq_t - mi_t),
        std::fabs(a.red + a.unq_r + a.unq_t + a.syn - mi_rt),
        std::fabs(a.red + a.unq_r + a.unq_t + a.syn + a.res - oracle::brute_entropy_y(j)),
        std::fabs(rep.isx[1] - mi_r),
        std::fabs(rep.isx[2] - mi_t),
        std::fabs(rep.isx[3] - mi_rt),
        std::fabs(s.red - a.red),
        std::fabs(s.unq_r - a.unq_t),
        std::fabs(s.unq_t - a.unq_r),
        std::fabs(s.syn - a.syn),
        std::fabs(s.res - a.res),
    };
    for (double e : errs) worst = std::max(worst, e);
  }
  return {worst <= kTol, fmt("1000 joints 2x8x2, max deviation %.3g (tol 1e-10)", worst)};
}

Outcome isx_oracle(const Context&) {
  Rng rng = Rng::derive(2, Stream::kSampling, {2});
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t nr = 1 + rng.below(4), nt = 1 + rng.below(3);
    const auto j = oracle::random_positive_joint(rng, nr, nt);
    for (Antichain beta : kAllAntichains) {
      worst = std::max(worst, std::fabs(isx_redundancy(j, beta) - oracle::brute_isx(j, beta)));
    }
  }
  const double copy_red = pid_atoms(oracle::copy_joint()).red;
  const double xor_red = pid_atoms(oracle::xor_joint()).red;
  const double copy_err = std::fabs(copy_red - 1.0);
  const double xor_err = std::fabs(xor_red - std::log2(2.0 / 3.0));
  const bool ok = worst <= 1e-12 && copy_err <= 1e-12 && xor_err <= 1e-12;
  return {ok, fmt("brute-force max diff %.3g, COPY red %.15g, XOR red %.15g", worst, copy_red, xor_red)};
}

Outcome gradient_check(const Context&) {
  const std::vector<std::pair<const char*, GoalParams>> goals = {
      {"unq_R", {1, 0, 0, 0, 0}}, {"unq_T", {0, 1, 0, 0, 0}}, {"red", {0, 0, 1, 0, 0}},
      {"syn", {0, 0, 0, 1, 0}},   {"res", {0, 0, 0, 0, 1}},   {"redundancy", GoalParams::redundancy()},
  };
  const BinningConfig binning;
  constexpr double kFloor = 1e-6;  // components smaller than this are compared in absolute terms
  double worst = 0.0;
  std::string where;
  int cases = 0;
  for (std::uint64_t trial = 0; trial < 8; ++trial) {
    Rng rng = Rng::derive(trial, Stream::kSampling, {3});
    const std::size_t n = 3 + rng.below(4);  // 3..6
    const std::size_t m = 2 + rng.below(7);  // 2..8
    const PatternSet patterns = gen_iid_patterns(m, n, rng.next_u64());
    const std::size_t neuron = rng.below(n);
    std::vector<double> row(n);
    for (double& w : row) w = 0.7 * rng.normal();
    row[neuron] = 0.0;
    for (const auto& [name, goal] : goals) {
      for (bool full : {false, true}) {
        ad::Tape tape;
        std::vector<double> grad;
        neuron_gradient(row, neuron, kDefaultTargetWeight, patterns, binning, goal, full, tape, grad);
        const std::vector<double> frozen = row;
        auto f = [&](std::span<const double> w) {
          return full ? neuron_goal(w, neuron, kDefaultTargetWeight, patterns, binning, goal)
                      : neuron_goal(w, neuron, kDefaultTargetWeight, patterns, binning, goal, frozen);
        };
        const FiniteDiffReport rep = finite_diff_check(f, row, grad, 1e-5, kFloor);
        ++cases;
        if (rep.max_rel_error >= worst) {
          worst = rep.max_rel_error;
          where = fmt("N=%zu m=%zu goal=%s %s", n, m, name, full ? "full" : "static");
        }
      }
    }
  }
  return {worst < 1e-4, fmt("%d cases (static and full binning gradient), max relative error %.3g (%s), tol 1e-4, floor 1e-6",
                              cases, worst, where.c_str())};
}

Outcome soft_binning_limit(const Context&) {
  Rng rng = Rng::derive(4, Stream::kSampling, {4});
  BinningConfig sharp;
  sharp.n_r = 7;
  sharp.n_t = 3;
  sharp.sigma_r = 1e-8;
  sharp.sigma_t = 1e-8;
  const BinGrid<double> grid{{-1.3, 0.4, sharp.n_r}, {-2.0, 1.5, sharp.n_t}};
  double cell_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r, t;
    for (int p = 0; p < 40; ++p) {
      // keep every sample at least 5% of a bin away from the nearest edge
      const double fr = 0.05 + 0.9 * rng.uniform(), ft = 0.05 + 0.9 * rng.uniform();
      r.push_back(grid.r.lo + grid.r.width * (static_cast<double>(rng.below(sharp.n_r)) + fr));
      t.push_back(grid.t.lo + grid.t.width * (static_cast<double>(rng.below(sharp.n_t)) + ft));
    }
    const auto soft = soft_histogram<double>(r, t, grid, sharp);
    const auto hard = oracle::hard_histogram(r, t, grid);
    for (std::size_t c = 0; c < soft.size(); ++c) cell_err = std::max(cell_err, std::fabs(soft[c] - hard[c]));
  }
  double norm_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    BinningConfig cfg;
    cfg.n_r = 1 + rng.below(80);
    cfg.n_t = 1 + rng.below(4);
    cfg.sigma_r = std::pow(10.0, -8.0 + 9.0 * rng.uniform());
    cfg.sigma_t = std::pow(10.0, -8.0 + 9.0 * rng.uniform());
    std::vector<double> r(30), t(30);
    for (double& x : r) x = 3.0 * rng.normal();
    for (double& x : t) x = rng.sign() * 2.3;
    const BinGrid<double> g = fit_grid<double>(r, t, cfg);
    for (std::size_t p = 0; p < r.size(); ++p) {
      const auto w = soft_weights<double>(r[p], t[p], g, cfg);
      double s = 0.0;
      for (double x : w) s += x;
      norm_err = std::max(norm_err, std::fabs(s - 1.0));
    }
  }
  return {cell_err <= 1e-6 && norm_err <= 1e-12,
          fmt("max cell deviation %.3g (tol 1e-6), max normalization error %.3g (tol 1e-12)", cell_err, norm_err)};
}

const std::vector<std::uint64_t> kFiveSeeds{0, 1, 2, 3, 4};
const std::vector<std::uint64_t> kThreeSeeds{0, 1, 2};

Outcome hebbian_capacity(const Context& ctx) {
  CapacityConfig cfg;
  cfg.trainer.method = Method::kHebbian;
  cfg.n = 500;
  cfg.alpha_max = 0.4;
  cfg.stop_at_failure = false;
  cfg.jobs = ctx.jobs;
  const CapacityResult r = estimate_capacity(cfg, kFiveSeeds);
  // mean a_theta per load over seeds
  std::vector<double> loads, a_theta;
  for (std::size_t k = 0; k < r.scans.front().loads.size(); ++k) {
    double s = 0.0;
    for (const auto& scan : r.scans) s += scan.loads[k].a_theta;
    loads.push_back(r.scans.front().loads[k].alpha);
    a_theta.push_back(s / static_cast<double>(r.scans.size()));
  }
  const double at_top = a_theta.back();
  double below = 1.0;
  for (std::size_t k = 0; k < loads.size(); ++k) {
    if (loads[k] < 0.1 - 1e-9) below = std::min(below, a_theta[k]);
  }
  const bool in_range = r.alpha_c >= 0.10 && r.alpha_c <= 0.17;
  const bool collapses = below >= 0.95 && at_top <= 0.05;
  return {in_range && collapses,
          fmt("alpha_c median %.2f CI [%.2f, %.2f] (need [0.10, 0.17]); mean a_theta %.3f below 0.1, %.3f at "
              "alpha=%.2f (need <= 0.05)",
              r.alpha_c, r.ci95.first, r.ci95.second, below, at_top, loads.back())};
}

Outcome hebbian_profile(const Context& ctx) {
  ProfileConfig cfg;
  cfg.trainer.method = Method::kHebbian;
  cfg.n = 500;
  cfg.alphas = {0.1, 0.5};
  cfg.jobs = ctx.jobs;
  const auto rows = pid_profile(cfg, kThreeSeeds);
  PidAtoms<double> mean[2]{};
  for (const auto& row : rows) {
    PidAtoms<double>& a = mean[row.alpha > 0.3 ? 1 : 0];
    a.unq_r += row.atoms.unq_r / 3.0;
    a.unq_t += row.atoms.unq_t / 3.0;
    a.red += row.atoms.red / 3.0;
    a.syn += row.atoms.syn / 3.0;
  }
  const PidAtoms<double>& lo = mean[0];
  const PidAtoms<double>& hi = mean[1];
  const bool red_max = lo.red > lo.unq_r && lo.red > lo.unq_t && lo.red > lo.syn;
  const bool shift = hi.red < lo.red && hi.unq_r > lo.unq_r;
  return {red_max && shift, fmt("alpha=0.1: red %.3f unq_R %.3f unq_T %.3f syn %.3f; alpha=0.5: red %.3f unq_R %.3f",
                                lo.red, lo.unq_r, lo.unq_t, lo.syn, hi.red, hi.unq_r)};
}

// Final a_theta of an N=100, m=100 infomorphic network for each seed.
std::vector<double> infomorphic_instance(const Context& ctx, const GoalParams& goal) {
  constexpr std::size_t n = 100, m = 100;
  Trainer trainer{Method::kInfomorphic, TrainConfig{}};
  trainer.config.goal = goal;
  trainer.config.jobs = ctx.jobs;
  std::vector<double> out;
  for (std::uint64_t seed : kThreeSeeds) {
    const PatternSet patterns = make_patterns({}, m, n, pattern_key(seed, n, m));
    const WeightMatrix w = train_weights(trainer, patterns, training_key(seed, n, m));
    out.push_back(evaluate_recall(w, patterns).a_theta);
  }
  return out;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.2f", x);
  return s;
}

std::size_t count_if(const std::vector<double>& v, const std::function<bool(double)>& pred) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), pred));
}

Outcome infomorphic_end_to_end(const Context& ctx) {
  const auto a = infomorphic_instance(ctx, GoalParams::redundancy());
  const std::size_t ok = count_if(a, [](double x) { return x >= 0.95; });
  return {ok >= 2, fmt("N=100 m=100 redundancy, a_theta per seed [%s], %zu/3 >= 0.95 (need 2)", list(a).c_str(), ok)};
}

Outcome infomorphic_extended(const Context& ctx) {
  CapacityConfig cfg;
  cfg.trainer.method = Method::kInfomorphic;
  cfg.trainer.config.jobs = 1;
  cfg.n = 100;
  cfg.alpha_start = 1.40;
  cfg.alpha_step = 0.05;
  cfg.alpha_max = 1.90;
  cfg.jobs = ctx.jobs;
  const CapacityResult r = estimate_capacity(cfg, kThreeSeeds);
  return {r.alpha_c >= 1.45 && r.alpha_c <= 1.70,
          fmt("alpha_c median %.2f CI [%.2f, %.2f], per seed [%s] (need [1.45, 1.70])", r.alpha_c, r.ci95.first,
              r.ci95.second, list(r.per_seed).c_str())};
}

Outcome goal_equivalence(const Context& ctx) {
  const auto mi = infomorphic_instance(ctx, GoalParams::target_information());
  const auto co = infomorphic_instance(ctx, GoalParams::co_information());
  const std::size_t mi_ok = count_if(mi, [](double x) { return x >= 0.95; });
  const std::size_t co_ok = count_if(co, [](double x) { return x <= 0.05; });
  return {mi_ok >= 2 && co_ok >= 2,
          fmt("I(Y:T) a_theta [%s] (%zu/3 >= 0.95); co-information a_theta [%s] (%zu/3 <= 0.05); need 2/3 each",
              list(mi).c_str(), mi_ok, list(co).c_str(), co_ok)};
}

Outcome finite_size(const Context&) {
  bool ok = true;
  std::string detail;
  const std::pair<std::size_t, std::size_t> cases[] = {{10, 1}, {10, 3}, {20, 4}};
  for (const auto& [n, m] : cases) {
    const auto mc = oracle::constant_neurons(n, m, 10000, 9);
    const double expected = static_cast<double>(n) / std::pow(2.0, static_cast<double>(m) - 1.0);
    const double formula = expected_constant_neurons(n, static_cast<double>(m) / static_cast<double>(n));
    const double z = mc.standard_error > 0.0 ? std::fabs(mc.mean - expected) / mc.standard_error
                                             : (std::fabs(mc.mean - expected) < 1e-12 ? 0.0 : INFINITY);
    ok = ok && z <= 3.0 && std::fabs(formula - expected) < 1e-12;
    detail += fmt("%s(N=%zu,m=%zu) MC %.4f±%.4f vs %.4f, z=%.2f", detail.empty() ? "" : "; ", n, m, mc.mean,
                  mc.standard_error, expected, z);
  }
  return {ok, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::vector<std::string> full{"amem"};
  full.insert(full.end(), args.begin(), args.end());
  const int code = run_cli(full, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome determinism(const Context& ctx) {
  const fs::path root = ctx.workdir / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  std::ofstream(config) << R"({"N": 20, "epochs": 30, "alpha": 0.5, "seeds": [1, 2, 3],
  "capacity": {"alpha_step": 0.05, "alpha_start": 0.05, "alpha_max": 0.6, "resamples": 500},
  "stability": {"alphas": [0.1, 0.3], "flips": [0.0, 0.1, 0.2]},
  "profile": {"alphas": [0.2, 0.5]}})";
  const std::vector<std::string> commands{"train", "capacity", "stability", "pid-profile"};
  const std::string wide = std::to_string(std::max<std::size_t>(ctx.jobs, 4));
  std::size_t compared = 0;
  std::string bad;
  for (const std::string& c : commands) {
    const fs::path first = root / (c + "-1"), second = root / (c + "-2");
    if (cli({c, "--config", config.string(), "--jobs", "1", "--out", first.string()}) != 0 ||
        cli({"rerun", (first / "manifest.json").string(), "--jobs", wide, "--out", second.string()}) != 0) {
      bad += c + " (run failed) ";
      continue;
    }
    for (const auto& entry : fs::directory_iterator(first)) {
      const fs::path name = entry.path().filename();
      if (name.extension() != ".csv") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(second / name)) bad += c + "/" + name.string() + " ";
    }
  }
  return {bad.empty() && compared > 0,
          fmt("%zu tables compared after rerun with --jobs 1 vs %s%s%s", compared, wide.c_str(),
              bad.empty() ? "" : "; differing: ", bad.c_str())};
}

Outcome cmaes_sanity(const Context&) {
  CmaesConfig cfg;
  cfg.budget = 5000;
  cfg.seed = 11;
  const auto sphere = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return -s;
  };
  const CmaesResult r = cmaes_maximize(sphere, {0.8, -0.6, 0.5, 0.9, -0.7}, cfg);
  const double norm = std::sqrt(-sphere(r.best_x));
  return {norm < 1e-3 && r.evaluations <= 5000,
          fmt("|x| = %.3g after %zu evaluations (need < 1e-3 within 5000)", norm, r.evaluations)};
}

Outcome cmaes_extended(const Context& ctx) {
  CapacityConfig cfg;
  cfg.trainer.method = Method::kInfomorphic;
  cfg.n = 100;
  cfg.alpha_start = 1.40;
  cfg.alpha_step = 0.05;
  cfg.alpha_max = 1.90;
  cfg.jobs = ctx.jobs;
  const CapacityResult red = estimate_capacity(cfg, kThreeSeeds);
  cfg.trainer.config.goal = GoalParams::optimized_ii();
  const CapacityResult opt = estimate_capacity(cfg, kThreeSeeds);
  return {opt.alpha_c >= red.alpha_c - 0.05,
          fmt("optimized goal (-0.16, 0.48, 0.25, 0.04, -0.63) alpha_c %.2f [%s] vs redundancy %.2f [%s] (need >= redundancy - 0.05)", opt.alpha_c,
              list(opt.per_seed).c_str(), red.alpha_c, list(red.per_seed).c_str())};
}

struct Criterion {
  int id;
  std::function<Outcome(const Context&)> check;
  std::function<Outcome(const Context&)> extended;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"amem acceptance suite"};
  std::vector<int> only;
  Context ctx;
  ctx.jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string workdir = (fs::temp_directory_path() / "amem-acceptance").string();
  app.add_option("--criterion", only, "run only these criteria (1-11)");
  app.add_flag("--extended", ctx.extended, "also run the long, non-gating checks of criteria 7 and 11");
  app.add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--workdir", workdir, "scratch directory for CLI runs");
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;

  const std::vector<Criterion> criteria{
      {1, pid_consistency, nullptr},
      {2, isx_oracle, nullptr},
      {3, gradient_check, nullptr},
      {4, soft_binning_limit, nullptr},
      {5, hebbian_capacity, nullptr},
      {6, hebbian_profile, nullptr},
      {7, infomorphic_end_to_end, infomorphic_extended},
      {8, goal_equivalence, nullptr},
      {9, finite_size, nullptr},
      {10, determinism, nullptr},
      {11, cmaes_sanity, cmaes_extended},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto run = [&](const std::function<Outcome(const Context&)>& fn, const std::string& label) {
      const auto start = std::chrono::steady_clock::now();
      Outcome o;
      try {
        o = fn(ctx);
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << label << ": " << o.detail
                << fmt(" [%.1f s]", secs) << std::endl;
      all = all && o.pass;
    };
    run(c.check, std::to_string(c.id));
    if (ctx.extended && c.extended) run(c.extended, std::to_string(c.id) + " (extended)");
  }
  return all ? 0 : 1;
}
