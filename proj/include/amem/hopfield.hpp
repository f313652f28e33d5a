#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amem/patterns.hpp"

namespace amem {

/// Dense row-major N x N recurrent weights. Row i holds neuron i's incoming
/// weights, which is also the unit trained by the infomorphic rule.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}
  WeightMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {w_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) { return {w_.data() + i * n_, n_}; }
  const std::vector<double>& values() const { return w_; }

  void zero_diagonal();
  bool is_symmetric() const;
  // Throws NumericDomainError on a non-zero diagonal or a non-finite entry.
  void validate() const;

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

enum class Termination { kFixedPoint, kLimitCycle, kMaxIterations };

std::string to_string(Termination t);

struct RecallResult {
  State final_state;
  int steps = 0;
  Termination termination = Termination::kMaxIterations;
};

std::vector<double> recurrent_drive(const WeightMatrix& w, std::span<const std::int8_t> state);

// Synchronous sign update; a drive of exactly zero maps to +1.
State step_sync(const WeightMatrix& w, std::span<const std::int8_t> state);

// One sweep updating neurons in index order, each seeing the latest state.
State step_sequential(const WeightMatrix& w, std::span<const std::int8_t> state);

enum class UpdateMode { kSynchronous, kSequential };

struct RecallOptions {
  int max_iter = 100;
  UpdateMode mode = UpdateMode::kSynchronous;
};

// Iterates the update until a fixed point or a period-2 cycle, at most max_iter steps.
RecallResult recall(const WeightMatrix& w, std::span<const std::int8_t> init, int max_iter = 100);
RecallResult recall(const WeightMatrix& w, std::span<const std::int8_t> init, const RecallOptions& options);

WeightMatrix hebbian_train(const PatternSet& patterns);

// Binary layout: "AMW1", N as uint64 little-endian, N*N float64 little-endian row-major.
void save_weights(const std::filesystem::path& path, const WeightMatrix& w);
WeightMatrix load_weights(const std::filesystem::path& path);

// One row per line, shortest round-trip decimal representation.
void export_weights_text(const std::filesystem::path& path, const WeightMatrix& w);
WeightMatrix import_weights_text(const std::filesystem::path& path);

}  // namespace amem
