#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amem/autodiff.hpp"
#include "amem/errors.hpp"

namespace amem {

/// Probability mass over (y, r_bin, t_bin); y = 0 encodes output -1 and
/// y = 1 encodes output +1. Stored row-major in (y, r_bin, t_bin).
template <ad::Scalar T>
class JointDistribution {
 public:
  JointDistribution(std::size_t n_r, std::size_t n_t, std::vector<T> mass)
      : n_r_(n_r), n_t_(n_t), p_(std::move(mass)) {
    if (n_r == 0 || n_t == 0 || p_.size() != 2 * n_r * n_t) {
      throw DimensionError("joint distribution needs 2 * n_r * n_t entries");
    }
  }

  std::size_t n_r() const { return n_r_; }
  std::size_t n_t() const { return n_t_; }
  const T& operator()(std::size_t y, std::size_t a, std::size_t b) const { return p_[(y * n_r_ + a) * n_t_ + b]; }
  const std::vector<T>& mass() const { return p_; }

  // Nonnegative, finite, total mass 1 within `tolerance`.
  void validate(double tolerance = 1e-12) const {
    double total = 0.0;
    for (const T& x : p_) {
      const double v = ad::value_of(x);
      if (!std::isfinite(v) || v < 0.0) throw NormalizationError("joint has a negative or non-finite entry");
      total += v;
    }
    if (std::fabs(total - 1.0) > tolerance) {
      throw NormalizationError("joint mass sums to " + std::to_string(total) + ", expected 1");
    }
  }

  // Same distribution with the roles of R and T exchanged.
  JointDistribution swapped_sources() const {
    std::vector<T> q;
    q.reserve(p_.size());
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t b = 0; b < n_t_; ++b) {
        for (std::size_t a = 0; a < n_r_; ++a) q.push_back((*this)(y, a, b));
      }
    }
    return JointDistribution(n_t_, n_r_, std::move(q));
  }

 private:
  std::size_t n_r_;
  std::size_t n_t_;
  std::vector<T> p_;
};

enum class SourceSet { kR, kT, kRT };

/// The four antichains of the two-source lattice.
enum class Antichain {
  kRedundancy,  // {{R},{T}}
  kR,           // {{R}}
  kT,           // {{T}}
  kRT,          // {{R,T}}
};

inline constexpr std::array<Antichain, 4> kAllAntichains = {Antichain::kRedundancy, Antichain::kR,
                                                            Antichain::kT, Antichain::kRT};

template <ad::Scalar T>
struct PidAtoms {
  T unq_r;
  T unq_t;
  T red;
  T syn;
  T res;
};

/// Goal coefficients in (unq_R, unq_T, red, syn, res) order.
struct GoalParams {
  double unq_r = 0.0;
  double unq_t = 0.0;
  double red = 0.0;
  double syn = 0.0;
  double res = 0.0;

  static GoalParams redundancy() { return {0, 0, 1, 0, 0}; }
  // I(Y:T) = unq_T + red
  static GoalParams target_information() { return {0, 1, 1, 0, 0}; }
  // I(Y:R:T) = red - syn
  static GoalParams co_information() { return {0, 0, 1, -1, 0}; }
  static GoalParams optimized_i() { return {-0.68, -0.27, 0.68, -0.77, -0.80}; }
  static GoalParams optimized_ii() { return {-0.16, 0.48, 0.25, 0.04, -0.63}; }

  std::array<double, 5> as_array() const { return {unq_r, unq_t, red, syn, res}; }
  static GoalParams from_array(const std::array<double, 5>& g) { return {g[0], g[1], g[2], g[3], g[4]}; }
  bool all_zero() const { return unq_r == 0 && unq_t == 0 && red == 0 && syn == 0 && res == 0; }
  void validate() const {
    for (double g : as_array()) {
      if (!std::isfinite(g)) throw ParameterError("goal coefficients must be finite");
    }
  }
  friend bool operator==(const GoalParams&, const GoalParams&) = default;
};

double entropy(std::span<const double> marginal);

namespace detail {

// -sum p log2 p over strictly positive entries
template <ad::Scalar T>
T entropy_terms(std::span<const T> probs) {
  std::vector<T> terms;
  for (const T& p : probs) {
    if (ad::value_of(p) > 0.0) terms.push_back(p * ad::log2(p));
  }
  if (terms.empty()) throw NumericDomainError("entropy of a distribution with no positive mass");
  return -ad::sum(std::span<const T>(terms));
}

}  // namespace detail

/// All marginals of a joint needed by the information measures.
template <ad::Scalar T>
struct JointMarginals {
  explicit JointMarginals(const JointDistribution<T>& joint) : n_r(joint.n_r()), n_t(joint.n_t()) {
    std::vector<T> buf;
    auto total = [&buf]() { return ad::sum(std::span<const T>(buf)); };
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t a = 0; a < n_r; ++a) {
        buf.clear();
        for (std::size_t b = 0; b < n_t; ++b) buf.push_back(joint(y, a, b));
        p_ya.push_back(total());
      }
      for (std::size_t b = 0; b < n_t; ++b) {
        buf.clear();
        for (std::size_t a = 0; a < n_r; ++a) buf.push_back(joint(y, a, b));
        p_yb.push_back(total());
      }
      buf.clear();
      for (std::size_t a = 0; a < n_r; ++a) buf.push_back(p_ya[y * n_r + a]);
      p_y.push_back(total());
    }
    for (std::size_t a = 0; a < n_r; ++a) p_a.push_back(p_ya[a] + p_ya[n_r + a]);
    for (std::size_t b = 0; b < n_t; ++b) p_b.push_back(p_yb[b] + p_yb[n_t + b]);
    for (std::size_t a = 0; a < n_r; ++a) {
      for (std::size_t b = 0; b < n_t; ++b) p_ab.push_back(joint(0, a, b) + joint(1, a, b));
    }
  }

  std::size_t n_r;
  std::size_t n_t;
  std::vector<T> p_y;   // [y]
  std::vector<T> p_ya;  // [y * n_r + a]
  std::vector<T> p_yb;  // [y * n_t + b]
  std::vector<T> p_a;
  std::vector<T> p_b;
  std::vector<T> p_ab;  // [a * n_t + b]
};

/// I(Y : sources) computed as H(Y) + H(S) - H(Y, S).
template <ad::Scalar T>
T mutual_information(const JointDistribution<T>& joint, SourceSet sources) {
  const JointMarginals<T> m(joint);
  const T h_y = detail::entropy_terms<T>(m.p_y);
  switch (sources) {
    case SourceSet::kR:
      return h_y + detail::entropy_terms<T>(m.p_a) - detail::entropy_terms<T>(m.p_ya);
    case SourceSet::kT:
      return h_y + detail::entropy_terms<T>(m.p_b) - detail::entropy_terms<T>(m.p_yb);
    case SourceSet::kRT:
      return h_y + detail::entropy_terms<T>(m.p_ab) - detail::entropy_terms<T>(joint.mass());
  }
  throw ParameterError("unknown source set");
}

/// Shared-exclusion redundancy: the p(y,r,t)-weighted average of
/// log2 p(y | E) / p(y), where E is the union over the antichain's source sets
/// of the event "every source in the set takes its realized value".
template <ad::Scalar T>
T isx_redundancy(const JointDistribution<T>& joint, const JointMarginals<T>& m, Antichain beta) {
  const std::size_t n_r = joint.n_r();
  const std::size_t n_t = joint.n_t();
  std::vector<T> union_mass;  // p(R=r or T=t), only needed for the two-singleton antichain
  if (beta == Antichain::kRedundancy) {
    union_mass.reserve(n_r * n_t);
    for (std::size_t a = 0; a < n_r; ++a) {
      for (std::size_t b = 0; b < n_t; ++b) union_mass.push_back(m.p_a[a] + m.p_b[b] - m.p_ab[a * n_t + b]);
    }
  }
  std::vector<T> terms;
  terms.reserve(2 * n_r * n_t);
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t a = 0; a < n_r; ++a) {
      for (std::size_t b = 0; b < n_t; ++b) {
        const T& p = joint(y, a, b);
        if (ad::value_of(p) == 0.0) continue;
        T cond = p;
        switch (beta) {
          case Antichain::kRedundancy:
            cond = (m.p_ya[y * n_r + a] + m.p_yb[y * n_t + b] - p) / union_mass[a * n_t + b];
            break;
          case Antichain::kR:
            cond = m.p_ya[y * n_r + a] / m.p_a[a];
            break;
          case Antichain::kT:
            cond = m.p_yb[y * n_t + b] / m.p_b[b];
            break;
          case Antichain::kRT:
            cond = p / m.p_ab[a * n_t + b];
            break;
        }
        terms.push_back(p * ad::log2(cond / m.p_y[y]));
      }
    }
  }
  if (terms.empty()) throw NumericDomainError("isx_redundancy: joint has no positive mass");
  return ad::sum(std::span<const T>(terms));
}

template <ad::Scalar T>
T isx_redundancy(const JointDistribution<T>& joint, Antichain beta) {
  return isx_redundancy(joint, JointMarginals<T>(joint), beta);
}

/// Every quantity the engine derives from one joint.
template <ad::Scalar T>
struct PidReport {
  std::array<T, 4> isx;  // indexed like kAllAntichains
  PidAtoms<T> atoms;
  T h_y;
};

template <ad::Scalar T>
PidReport<T> pid_report(const JointDistribution<T>& joint) {
  const JointMarginals<T> m(joint);
  const T red = isx_redundancy(joint, m, Antichain::kRedundancy);
  const T i_r = isx_redundancy(joint, m, Antichain::kR);
  const T i_t = isx_redundancy(joint, m, Antichain::kT);
  const T i_rt = isx_redundancy(joint, m, Antichain::kRT);
  const T h_y = detail::entropy_terms<T>(m.p_y);
  const T unq_r = i_r - red;
  const T unq_t = i_t - red;
  const T syn = i_rt - unq_r - unq_t - red;
  return {{red, i_r, i_t, i_rt}, {unq_r, unq_t, red, syn, h_y - i_rt}, h_y};
}

template <ad::Scalar T>
PidAtoms<T> pid_atoms(const JointDistribution<T>& joint) {
  return pid_report(joint).atoms;
}

template <ad::Scalar T>
T goal_value(const PidAtoms<T>& atoms, const GoalParams& g) {
  return atoms.unq_r * g.unq_r + atoms.unq_t * g.unq_t + atoms.red * g.red + atoms.syn * g.syn + atoms.res * g.res;
}

/// I(Y:R) + I(Y:T) - I(Y:R,T)
template <ad::Scalar T>
T co_information(const JointDistribution<T>& joint) {
  return mutual_information(joint, SourceSet::kR) + mutual_information(joint, SourceSet::kT) -
         mutual_information(joint, SourceSet::kRT);
}

// Structured text (JSON) record of a joint with its I^sx values, atoms,
// mutual informations and output entropy.
std::string dump_joint_record(const JointDistribution<double>& joint);

}  // namespace amem
