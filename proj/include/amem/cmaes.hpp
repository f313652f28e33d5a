#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace amem {

struct CmaesConfig {
  double sigma0 = 0.3;
  std::size_t budget = 5000;      // objective evaluations
  std::size_t population = 0;     // 0: 4 + floor(3 ln d)
  std::vector<double> lower;      // empty: unbounded
  std::vector<double> upper;
  double tol_x = 1e-12;
  std::uint64_t seed = 0;
};

struct CmaesResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  std::vector<double> mean;
  std::size_t evaluations = 0;
  std::size_t generations = 0;
};

// Evaluates one generation; returns one value per candidate.
using BatchObjective = std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

/// Standard (mu/mu_w, lambda) CMA-ES maximizing the objective. Candidates
/// outside the box are evaluated at their projection, with a quadratic
/// penalty on the distance moved.
CmaesResult cmaes_maximize(const BatchObjective& objective, std::vector<double> x0, const CmaesConfig& config);

CmaesResult cmaes_maximize(const std::function<double(const std::vector<double>&)>& objective,
                           std::vector<double> x0, const CmaesConfig& config);

}  // namespace amem
