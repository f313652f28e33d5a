#include "amem/autodiff.hpp"

namespace amem::ad {

std::vector<double> Tape::adjoints(Index output) const {
  std::vector<double> adj;
  adjoints(output, adj);
  return adj;
}

void Tape::adjoints(Index output, std::vector<double>& adj) const {
  adj.assign(static_cast<std::size_t>(output) + 1, 0.0);
  adj[output] = 1.0;
  for (std::size_t i = static_cast<std::size_t>(output) + 1; i-- > 0;) {
    const double a = adj[i];
    if (a == 0.0) continue;
    for (std::uint32_t k = begin_[i]; k < begin_[i + 1]; ++k) {
      adj[partials_[k].parent] += a * partials_[k].weight;
    }
  }
}

Var sum(std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("sum of an empty Var list");
  Tape* tape = xs.front().tape();
  double s = 0.0;
  for (const Var& x : xs) {
    s += x.value();
    tape->add(x.index(), 1.0);
  }
  return Var::from_node(tape, tape->finish(s), s);
}

Var weighted_sum(std::span<const double> coeffs, std::span<const Var> xs) {
  if (coeffs.size() != xs.size()) throw DimensionError("weighted_sum: size mismatch");
  if (xs.empty()) throw DimensionError("weighted_sum of an empty Var list");
  Tape* tape = xs.front().tape();
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    s += coeffs[k] * xs[k].value();
    tape->add(xs[k].index(), coeffs[k]);
  }
  return Var::from_node(tape, tape->finish(s), s);
}

Var weighted_inner(std::span<const double> coeffs, std::span<const Var> xs, std::span<const Var> ys) {
  if (coeffs.size() != xs.size() || xs.size() != ys.size()) throw DimensionError("weighted_inner: size mismatch");
  if (xs.empty()) throw DimensionError("weighted_inner of an empty Var list");
  Tape* tape = xs.front().tape();
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const double x = xs[k].value();
    const double y = ys[k].value();
    s += c * x * y;
    tape->add(xs[k].index(), c * y);
    tape->add(ys[k].index(), c * x);
  }
  return Var::from_node(tape, tape->finish(s), s);
}

std::vector<double> backward(const Var& goal, std::span<const Var> parameters) {
  std::vector<double> grad(parameters.size(), 0.0);
  if (goal.tape() == nullptr) return grad;
  thread_local std::vector<double> adj;
  goal.tape()->adjoints(goal.index(), adj);
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    if (parameters[k].tape() != goal.tape()) continue;
    if (parameters[k].index() <= goal.index()) grad[k] = adj[parameters[k].index()];
  }
  return grad;
}

}  // namespace amem::ad
