#include "amem/optim.hpp"

#include <algorithm>
#include <cmath>

#include "amem/errors.hpp"

namespace amem {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double eta) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw DimensionError("adam_step: parameter, gradient and moment sizes differ");
  }
  const AdamConfig& c = state.config;
  ++state.step_count;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
  for (std::size_t k = 0; k < params.size(); ++k) {
    double& m = state.first_moment[k];
    double& v = state.second_moment[k];
    m = c.beta1 * m + (1.0 - c.beta1) * grads[k];
    v = c.beta2 * v + (1.0 - c.beta2) * grads[k] * grads[k];
    const double m_hat = bias1 > 0.0 ? m / bias1 : m;
    const double v_hat = bias2 > 0.0 ? v / bias2 : v;
    const double denom = std::sqrt(v_hat) + c.epsilon;
    if (denom > 0.0) params[k] += eta * m_hat / denom;
  }
}

FiniteDiffReport finite_diff_check(const std::function<double(std::span<const double>)>& objective,
                                   std::span<const double> params, std::span<const double> analytic,
                                   double h, double floor) {
  if (params.size() != analytic.size()) throw DimensionError("finite_diff_check: size mismatch");
  if (!(h > 0.0)) throw ParameterError("finite_diff_check: step must be positive");
  FiniteDiffReport report;
  report.numeric.resize(params.size());
  std::vector<double> x(params.begin(), params.end());
  auto central = [&](std::size_t k, double step) {
    const double x0 = x[k];
    x[k] = x0 + step;
    const double fp = objective(x);
    x[k] = x0 - step;
    const double fm = objective(x);
    x[k] = x0;
    return (fp - fm) / (2.0 * step);
  };
  // roundoff floor of a central difference at step h/2
  const double noise = 1e3 * 2.220446049250313e-16 * (std::fabs(objective(x)) + 1.0) / h;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double fd = central(k, h);
    const double fd_half = central(k, 0.5 * h);
    report.numeric[k] = fd;
    const double scale = std::max(std::fabs(fd), std::fabs(fd_half));
    if (std::fabs(fd - fd_half) > 1e-3 * scale + noise) report.consistent = false;
    const double err =
        std::fabs(analytic[k] - fd) / std::max({std::fabs(analytic[k]), std::fabs(fd), floor});
    if (k == 0 || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = k;
    }
  }
  return report;
}

}  // namespace amem
