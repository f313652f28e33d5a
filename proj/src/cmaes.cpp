#include "amem/cmaes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "amem/errors.hpp"
#include "amem/rng.hpp"

namespace amem {

namespace {

constexpr double kBoundPenalty = 1.0;

}  // namespace

CmaesResult cmaes_maximize(const BatchObjective& objective, std::vector<double> x0, const CmaesConfig& config) {
  const std::size_t n = x0.size();
  if (n == 0) throw DimensionError("cmaes: empty start point");
  if (!(config.sigma0 > 0.0)) throw ParameterError("cmaes: sigma0 must be > 0");
  const bool bounded = !config.lower.empty() || !config.upper.empty();
  if (bounded && (config.lower.size() != n || config.upper.size() != n)) {
    throw DimensionError("cmaes: bounds must match the dimension");
  }
  const double dn = static_cast<double>(n);
  const std::size_t lambda =
      config.population > 0 ? config.population : 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(dn)));
  if (lambda < 2) throw ParameterError("cmaes: population must be >= 2");
  if (config.budget < lambda) throw ParameterError("cmaes: budget smaller than one generation");
  const std::size_t mu = lambda / 2;

  Eigen::VectorXd weights(mu);
  for (std::size_t i = 0; i < mu; ++i) {
    weights[i] = std::log(static_cast<double>(lambda) / 2.0 + 0.5) - std::log(static_cast<double>(i + 1));
  }
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(n));
  double sigma = config.sigma0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);

  Rng rng = Rng::derive(config.seed, Stream::kSearch);
  CmaesResult result;
  result.best_f = -std::numeric_limits<double>::infinity();

  std::vector<Eigen::VectorXd> ys(lambda, Eigen::VectorXd(n));
  std::vector<std::vector<double>> candidates(lambda, std::vector<double>(n));
  std::vector<double> penalty(lambda);

  while (result.evaluations + lambda <= config.budget) {
    for (std::size_t k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
      ys[k] = basis * scale.cwiseProduct(z);
      const Eigen::VectorXd x = mean + sigma * ys[k];
      double moved = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = x[i];
        if (bounded) v = std::clamp(v, config.lower[i], config.upper[i]);
        moved += (v - x[i]) * (v - x[i]);
        candidates[k][i] = v;
      }
      penalty[k] = kBoundPenalty * moved;
    }
    const std::vector<double> values = objective(candidates);
    if (values.size() != lambda) throw DimensionError("cmaes: objective returned wrong number of values");
    result.evaluations += lambda;
    ++result.generations;

    std::vector<double> fitness(lambda);
    for (std::size_t k = 0; k < lambda; ++k) {
      fitness[k] = values[k] - penalty[k];
      if (values[k] > result.best_f) {
        result.best_f = values[k];
        result.best_x = candidates[k];
      }
    }
    std::vector<std::size_t> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean += sigma * y_w;

    const Eigen::VectorXd inv_sqrt_y = basis * scale.cwiseInverse().asDiagonal() * basis.transpose() * y_w;
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_y;
    const double gen = static_cast<double>(result.generations);
    const bool hsig =
        ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen)) / chi_n < 1.4 + 2.0 / (dn + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < mu; ++i) rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov) + cmu * rank_mu;
    sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    basis = eig.eigenvectors();
    scale = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

    if (sigma * scale.maxCoeff() < config.tol_x) break;
  }
  result.mean.assign(mean.data(), mean.data() + n);
  return result;
}

CmaesResult cmaes_maximize(const std::function<double(const std::vector<double>&)>& objective,
                           std::vector<double> x0, const CmaesConfig& config) {
  return cmaes_maximize(
      [&](const std::vector<std::vector<double>>& xs) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(objective(x));
        return out;
      },
      std::move(x0), config);
}

}  // namespace amem
