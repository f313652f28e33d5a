#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace amem {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t size, AdamConfig cfg = {})
      : first_moment(size, 0.0), second_moment(size, 0.0), config(cfg) {}

  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step_count = 0;
  AdamConfig config;
};

// Bias-corrected Adam update in the ascent direction: params += eta * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double eta);

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  // False when central differences at h and h/2 disagree somewhere, i.e. the
  // objective is not smooth at this point (hard bin edges, kinks).
  bool consistent = true;
  std::vector<double> numeric;
};

// Compares `analytic` against central differences of `objective` at `params`.
// The error for coordinate k is |a_k - fd_k| / max(|a_k|, |fd_k|, floor); the
// floor keeps components below the difference quotient's resolution from
// dominating.
FiniteDiffReport finite_diff_check(const std::function<double(std::span<const double>)>& objective,
                                   std::span<const double> params, std::span<const double> analytic,
                                   double h, double floor = 1e-12);

}  // namespace amem
