#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "amem/errors.hpp"

namespace amem::ad {

/// Linearized computation tape for reverse-mode differentiation.
///
/// Every node stores its forward value and the list of (parent, local partial)
/// pairs. A reverse sweep from a scalar output accumulates adjoints in one pass
/// over the nodes in reverse recording order, so the gradient cost is linear in
/// the number of recorded partials. One tape is meant to be owned by one thread.
class Tape {
 public:
  using Index = std::uint32_t;

  struct Partial {
    Index parent;
    double weight;
  };

  Tape() { begin_.push_back(0); }

  Index leaf(double value) { return finish(value); }

  Index push(double value, std::initializer_list<Partial> partials) {
    for (const Partial& q : partials) partials_.push_back(q);
    return finish(value);
  }

  Index push(double value, std::span<const Partial> partials) {
    for (const Partial& q : partials) partials_.push_back(q);
    return finish(value);
  }

  // Incremental recording of an n-ary node: add() its partials, then finish().
  void add(Index parent, double weight) { partials_.push_back({parent, weight}); }
  Index finish(double value) {
    values_.push_back(value);
    begin_.push_back(static_cast<std::uint32_t>(partials_.size()));
    return static_cast<Index>(values_.size() - 1);
  }

  std::size_t size() const { return values_.size(); }
  std::size_t partial_count() const { return partials_.size(); }
  double value(Index i) const { return values_[i]; }

  void clear() {
    values_.clear();
    partials_.clear();
    begin_.assign(1, 0);
  }

  void reserve(std::size_t nodes, std::size_t partials) {
    values_.reserve(nodes);
    begin_.reserve(nodes + 1);
    partials_.reserve(partials);
  }

  // Adjoint of every node with respect to `output` (d output / d node).
  std::vector<double> adjoints(Index output) const;
  void adjoints(Index output, std::vector<double>& adj) const;

 private:
  std::vector<double> values_;
  std::vector<std::uint32_t> begin_;
  std::vector<Partial> partials_;
};

/// Scalar recorded on a Tape. Arithmetic with plain doubles treats them as
/// constants and records no node for them.
class Var {
 public:
  using Index = Tape::Index;

  Var() = default;
  Var(Tape& tape, double value) : tape_(&tape), index_(tape.leaf(value)), value_(value) {}

  static Var from_node(Tape* tape, Index index, double value) {
    Var v;
    v.tape_ = tape;
    v.index_ = index;
    v.value_ = value;
    return v;
  }

  double value() const { return value_; }
  Tape* tape() const { return tape_; }
  Index index() const { return index_; }

 private:
  Tape* tape_ = nullptr;
  Index index_ = 0;
  double value_ = 0.0;
};

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Var>;

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

namespace detail {

inline Var unary(const Var& a, double value, double da) {
  Tape* t = a.tape();
  t->add(a.index(), da);
  return Var::from_node(t, t->finish(value), value);
}

inline Var binary(const Var& a, const Var& b, double value, double da, double db) {
  Tape* t = a.tape();
  t->add(a.index(), da);
  t->add(b.index(), db);
  return Var::from_node(t, t->finish(value), value);
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::binary(a, b, a.value() + b.value(), 1.0, 1.0); }
inline Var operator-(const Var& a, const Var& b) { return detail::binary(a, b, a.value() - b.value(), 1.0, -1.0); }
inline Var operator*(const Var& a, const Var& b) {
  return detail::binary(a, b, a.value() * b.value(), b.value(), a.value());
}
inline Var operator/(const Var& a, const Var& b) {
  if (b.value() == 0.0) {
    throw NumericDomainError("division by zero at tape node " + std::to_string(a.tape()->size()));
  }
  const double q = a.value() / b.value();
  return detail::binary(a, b, q, 1.0 / b.value(), -q / b.value());
}
inline Var operator-(const Var& a) { return detail::unary(a, -a.value(), -1.0); }

inline Var operator+(const Var& a, double c) { return detail::unary(a, a.value() + c, 1.0); }
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) { return detail::unary(a, a.value() - c, 1.0); }
inline Var operator-(double c, const Var& a) { return detail::unary(a, c - a.value(), -1.0); }
inline Var operator*(const Var& a, double c) { return detail::unary(a, a.value() * c, c); }
inline Var operator*(double c, const Var& a) { return a * c; }
inline Var operator/(const Var& a, double c) {
  if (c == 0.0) throw NumericDomainError("division by constant zero");
  return detail::unary(a, a.value() / c, 1.0 / c);
}
inline Var operator/(double c, const Var& a) {
  if (a.value() == 0.0) {
    throw NumericDomainError("division by zero at tape node " + std::to_string(a.tape()->size()));
  }
  const double q = c / a.value();
  return detail::unary(a, q, -q / a.value());
}

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }

// Elementary functions. The double overloads let templated numerics share one
// code path for plain evaluation and for recording.

inline double exp(double x) { return std::exp(x); }
inline Var exp(const Var& a) {
  const double e = std::exp(a.value());
  return detail::unary(a, e, e);
}

inline double log2(double x) {
  if (!(x > 0.0)) throw NumericDomainError("log2 of non-positive value " + std::to_string(x));
  return std::log2(x);
}
inline Var log2(const Var& a) {
  if (!(a.value() > 0.0)) {
    throw NumericDomainError("log2 of non-positive value " + std::to_string(a.value()) +
                             " at tape node " + std::to_string(a.index()));
  }
  return detail::unary(a, std::log2(a.value()), 1.0 / (a.value() * std::numbers::ln2));
}

inline double sigmoid(double x) { return detail::stable_sigmoid(x); }
inline Var sigmoid(const Var& a) {
  const double s = detail::stable_sigmoid(a.value());
  return detail::unary(a, s, s * (1.0 - s));
}

inline double abs(double x) { return std::fabs(x); }
inline Var abs(const Var& a) { return detail::unary(a, std::fabs(a.value()), a.value() < 0.0 ? -1.0 : 1.0); }

inline double sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}
Var sum(std::span<const Var> xs);

// sum_k coeffs[k] * xs[k]; terms with an exactly zero coefficient are not recorded.
inline double weighted_sum(std::span<const double> coeffs, std::span<const double> xs) {
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) s += coeffs[k] * xs[k];
  return s;
}
Var weighted_sum(std::span<const double> coeffs, std::span<const Var> xs);

// sum_k coeffs[k] * xs[k] * ys[k] recorded as a single node.
inline double weighted_inner(std::span<const double> coeffs, std::span<const double> xs,
                             std::span<const double> ys) {
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) s += coeffs[k] * xs[k] * ys[k];
  return s;
}
Var weighted_inner(std::span<const double> coeffs, std::span<const Var> xs, std::span<const Var> ys);

// Elementwise selection by value; the selected operand is returned unchanged so
// the gradient flows to it alone.
template <Scalar T>
const T& min_of(const T& a, const T& b) {
  return value_of(b) < value_of(a) ? b : a;
}
template <Scalar T>
const T& max_of(const T& a, const T& b) {
  return value_of(b) > value_of(a) ? b : a;
}

/// dG/dparam for each parameter in one reverse sweep; parameters that do not
/// reach `goal` get 0.
std::vector<double> backward(const Var& goal, std::span<const Var> parameters);

}  // namespace amem::ad
