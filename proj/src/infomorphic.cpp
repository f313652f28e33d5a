#include "amem/infomorphic.hpp"

#include <cmath>

#include "amem/cancel.hpp"
#include "amem/errors.hpp"
#include "amem/parallel.hpp"
#include "amem/rng.hpp"

namespace amem {

void TrainConfig::validate() const {
  if (!(eta > 0.0)) throw ParameterError("learning rate must be > 0");
  if (reps < 1) throw ParameterError("reps must be >= 1");
  if (!(lambda_r >= 0.0)) throw ParameterError("lambda_r must be >= 0");
  if (!(w_t > 0.0)) throw ParameterError("target weight must be > 0");
  goal.validate();
  binning.validate();
}

InfomorphicNetwork init_network(std::size_t n, double lambda_r, std::uint64_t seed, double w_t) {
  if (n < 2) throw DimensionError("infomorphic network needs N >= 2");
  const double stddev = lambda_r * std::sqrt(2.0 / static_cast<double>(n));
  Rng rng = Rng::derive(seed, Stream::kInit);
  InfomorphicNetwork net{WeightMatrix(n), std::vector<double>(n, w_t)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double z = rng.normal();
      if (i != j) net.w_r(i, j) = stddev * z;
    }
  }
  return net;
}

ForwardPass forward_train(const InfomorphicNetwork& net, std::span<const std::int8_t> pattern,
                          std::uint64_t seed) {
  const std::size_t n = net.size();
  if (pattern.size() != n) throw DimensionError("forward_train: pattern length does not match N");
  ForwardPass out;
  out.r = recurrent_drive(net.w_r, pattern);
  out.t.resize(n);
  out.p_plus.resize(n);
  out.y.resize(n);
  Rng rng = Rng::derive(seed, Stream::kSampling);
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = net.w_t[i] * pattern[i];
    out.p_plus[i] = ad::sigmoid(out.r[i] + out.t[i]);
    out.y[i] = rng.uniform() < out.p_plus[i] ? 1 : -1;
  }
  return out;
}

namespace {

std::vector<double> drives(std::span<const double> row, std::size_t neuron, const PatternSet& patterns) {
  std::vector<double> r(patterns.count(), 0.0);
  for (std::size_t p = 0; p < patterns.count(); ++p) {
    auto xi = patterns.row(p);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j != neuron) r[p] += row[j] * xi[j];
    }
  }
  return r;
}

template <ad::Scalar T>
PidReport<T> neuron_report(std::span<const T> row, std::size_t neuron, double w_t, const PatternSet& patterns,
                           const BinningConfig& binning, std::span<const double> bin_r) {
  const NeuronSampleSet<T> samples = neuron_samples<T>(row, neuron, w_t, patterns);
  return pid_report(estimate_joint(samples, binning, bin_r));
}

NeuronOutcome to_outcome(const PidReport<double>& r, const GoalParams& goal) {
  NeuronOutcome o;
  o.atoms = r.atoms;
  o.h_y = r.h_y;
  o.goal = goal_value(r.atoms, goal);
  return o;
}

}  // namespace

NeuronOutcome evaluate_neuron(std::span<const double> row, std::size_t neuron, double w_t,
                              const PatternSet& patterns, const BinningConfig& binning, const GoalParams& goal) {
  return to_outcome(neuron_report<double>(row, neuron, w_t, patterns, binning, {}), goal);
}

double neuron_goal(std::span<const double> row, std::size_t neuron, double w_t, const PatternSet& patterns,
                   const BinningConfig& binning, const GoalParams& goal, std::span<const double> bin_row) {
  if (bin_row.empty()) return evaluate_neuron(row, neuron, w_t, patterns, binning, goal).goal;
  if (bin_row.size() != row.size()) throw DimensionError("neuron_goal: bin row length does not match N");
  const std::vector<double> bin_r = drives(bin_row, neuron, patterns);
  return to_outcome(neuron_report<double>(row, neuron, w_t, patterns, binning, bin_r), goal).goal;
}

NeuronOutcome neuron_gradient(std::span<const double> row, std::size_t neuron, double w_t,
                              const PatternSet& patterns, const BinningConfig& binning, const GoalParams& goal,
                              bool bin_gradient, ad::Tape& tape, std::vector<double>& gradient) {
  tape.clear();
  const std::vector<double> bin_r = bin_gradient ? std::vector<double>{} : drives(row, neuron, patterns);
  std::vector<ad::Var> params;
  params.reserve(row.size());
  for (double w : row) params.emplace_back(tape, w);
  const PidReport<ad::Var> r = neuron_report<ad::Var>(params, neuron, w_t, patterns, binning, bin_r);
  const ad::Var g = goal_value(r.atoms, goal);
  gradient = ad::backward(g, params);
  gradient[neuron] = 0.0;
  NeuronOutcome o;
  o.atoms = {r.atoms.unq_r.value(), r.atoms.unq_t.value(), r.atoms.red.value(), r.atoms.syn.value(),
             r.atoms.res.value()};
  o.h_y = r.h_y.value();
  o.goal = g.value();
  return o;
}

TrainerState TrainerState::fresh(std::size_t n, const AdamConfig& cfg) {
  TrainerState s;
  s.adam.assign(n, AdamState(n, cfg));
  return s;
}

EpochReport train_epoch(InfomorphicNetwork& net, const PatternSet& patterns, const TrainConfig& config,
                        TrainerState& state) {
  const std::size_t n = net.size();
  if (patterns.size() != n) throw DimensionError("train_epoch: pattern length does not match N");
  if (state.adam.size() != n) state = TrainerState::fresh(n, config.adam);
  const std::size_t epoch = state.epochs_done;

  EpochReport report;
  // Sampled outputs of the stochastic training step; they do not enter the
  // joint, which is built from the analytic conditionals.
  std::size_t agree = 0;
  for (std::size_t p = 0; p < patterns.count(); ++p) {
    const std::uint64_t key = mix64(config.seed ^ mix64((static_cast<std::uint64_t>(epoch) << 32) | p));
    const ForwardPass fwd = forward_train(net, patterns.row(p), key);
    for (std::size_t i = 0; i < n; ++i) agree += fwd.y[i] == patterns(p, i) ? 1 : 0;
  }
  report.sampled_agreement = static_cast<double>(agree) / static_cast<double>(patterns.count() * n);

  report.neurons.resize(n);
  std::vector<std::vector<double>> grads(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    thread_local ad::Tape tape;
    try {
      report.neurons[i] = neuron_gradient(net.w_r.row(i), i, net.w_t[i], patterns, config.binning, config.goal,
                                          config.bin_gradient, tape, grads[i]);
    } catch (const NumericDomainError& e) {
      report.neurons[i] = NeuronOutcome{};
      report.neurons[i].skipped = true;
      report.neurons[i].diagnostic = e.what();
    }
  });
  // Rows are only written after every neuron has read its inputs for this epoch.
  for (std::size_t i = 0; i < n; ++i) {
    if (report.neurons[i].skipped) {
      ++report.skipped;
      continue;
    }
    adam_step(net.w_r.row(i), grads[i], state.adam[i], config.eta);
    net.w_r(i, i) = 0.0;
  }
  ++state.epochs_done;

  PidAtoms<double> sum{0, 0, 0, 0, 0};
  double goal_sum = 0.0;
  for (const NeuronOutcome& o : report.neurons) {
    sum.unq_r += o.atoms.unq_r;
    sum.unq_t += o.atoms.unq_t;
    sum.red += o.atoms.red;
    sum.syn += o.atoms.syn;
    sum.res += o.atoms.res;
    goal_sum += o.goal;
  }
  const double inv = 1.0 / static_cast<double>(n);
  report.mean_atoms = {sum.unq_r * inv, sum.unq_t * inv, sum.red * inv, sum.syn * inv, sum.res * inv};
  report.mean_goal = goal_sum * inv;
  return report;
}

TrainResult train(InfomorphicNetwork net, const PatternSet& patterns, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  TrainerState state = TrainerState::fresh(net.size(), config.adam);
  TrainResult result;
  result.telemetry.reserve(config.epochs);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    check_cancel();
    EpochReport last;
    for (std::size_t rep = 0; rep < config.reps; ++rep) last = train_epoch(net, patterns, config, state);
    EpochTelemetry t{e, last.mean_atoms, last.mean_goal, last.skipped, last.sampled_agreement};
    if (on_epoch) on_epoch(t);
    result.telemetry.push_back(t);
  }
  result.net = std::move(net);
  return result;
}

TrainResult train_infomorphic(const PatternSet& patterns, const TrainConfig& config, const EpochCallback& on_epoch) {
  return train(init_network(patterns.size(), config.lambda_r, config.seed, config.w_t), patterns, config, on_epoch);
}

}  // namespace amem
