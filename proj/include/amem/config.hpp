#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amem/harness.hpp"

namespace amem {

/// Everything one experiment needs. Omitted fields keep the defaults below.
struct ExperimentConfig {
  Method method = Method::kInfomorphic;
  std::size_t n = 100;
  double w_t = kDefaultTargetWeight;
  double lambda_r = 1e-3;
  std::string optimizer = "adam";
  AdamConfig adam;
  double eta = 0.05;
  std::size_t epochs = 5000;
  std::size_t reps = 1;
  BinningConfig binning;
  bool sequential = false;
  int n_iter = 100;
  double theta = 0.95;
  bool bin_gradient = false;
  GoalParams goal = GoalParams::redundancy();

  enum class Source { kIid, kCorrelated, kFile };
  Source source = Source::kIid;
  double persistence = 0.5;
  std::string pattern_file;

  std::optional<std::size_t> m;  // overrides alpha when set
  double alpha = 0.1;
  std::vector<std::uint64_t> seeds{0};
  std::string output;
  std::size_t jobs = 1;
  double flip_fraction = 0.0;

  struct Capacity {
    double alpha_step = 0.02;
    double alpha_start = 0.02;
    double alpha_max = 2.0;
    double threshold = 0.95;
    double finite_size_limit = 0.5;
    bool stop_at_failure = true;
    std::size_t resamples = 10000;
    std::uint64_t bootstrap_seed = 0;
    friend bool operator==(const Capacity&, const Capacity&) = default;
  } capacity;

  struct Stability {
    std::vector<double> alphas{0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> flips{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
    double epsilon = 0.95;
    friend bool operator==(const Stability&, const Stability&) = default;
  } stability;

  struct Profile {
    std::vector<double> alphas{0.02, 0.06, 0.1, 0.14, 0.2, 0.3, 0.5};
    friend bool operator==(const Profile&, const Profile&) = default;
  } profile;

  struct Landscape {
    // per coefficient, order (unq_R, unq_T, red, syn, res)
    std::array<std::vector<double>, 5> axes{std::vector<double>{0.0}, std::vector<double>{0.0},
                                            std::vector<double>{1.0}, std::vector<double>{0.0},
                                            std::vector<double>{0.0}};
    friend bool operator==(const Landscape&, const Landscape&) = default;
  } landscape;

  struct Optimize {
    std::size_t budget = 200;
    double sigma0 = 0.3;
    std::array<double, 5> lower{-1, -1, -1, -1, -1};
    std::array<double, 5> upper{1, 1, 1, 1, 1};
    std::array<double, 5> start{0, 0, 1, 0, 0};
    std::uint64_t search_seed = 0;
    std::vector<std::uint64_t> validation_seeds;
    friend bool operator==(const Optimize&, const Optimize&) = default;
  } optimize;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  // Throws ConfigError on out-of-range values.
  void validate() const;

  std::size_t pattern_count() const;
  TrainConfig train_config(std::uint64_t seed) const;
  Trainer trainer() const;
  PatternSource pattern_source() const;
  RecallOptions recall_options() const;
  CapacityConfig capacity_config() const;
  StabilityConfig stability_config() const;
  ProfileConfig profile_config() const;
  OptimizeConfig optimize_config() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Unknown keys and wrong types are ConfigErrors.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Accepts a config file or a run manifest (whose "config" member is used).
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

}  // namespace amem
