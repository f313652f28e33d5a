#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "amem/config.hpp"
#include "amem/hopfield.hpp"
#include "amem/table.hpp"

namespace amem {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "AMEM_OUTPUT_ROOT";

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string iso_timestamp(std::chrono::system_clock::time_point t);

// $AMEM_OUTPUT_ROOT (or "runs") / <command>-<hash of config and seeds>.
std::filesystem::path default_output_dir(const std::string& command, const ExperimentConfig& config);

/// One experiment directory: manifest, config snapshot, tables, checkpoints.
class Experiment {
 public:
  // Refuses a non-empty existing directory unless `force`.
  Experiment(std::filesystem::path root, std::string command, ExperimentConfig config, bool force);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& name) const { return root_ / name; }

  void write_table(const std::string& name, const Table& table);
  void write_text(const std::string& name, const std::string& content);
  void add_artifact(const std::string& name);
  void set_result(const std::string& key, nlohmann::ordered_json value);

  // status: "running", "complete", "failed" or "interrupted".
  void write_manifest(const std::string& status, const std::string& error = "");

 private:
  std::filesystem::path root_;
  std::string command_;
  ExperimentConfig config_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point started_mono_;
  std::vector<std::string> artifacts_;
  nlohmann::ordered_json results_ = nlohmann::ordered_json::object();
};

struct Checkpoint {
  WeightMatrix weights;
  nlohmann::json sidecar;  // empty object when no sidecar exists
};

// <stem>.amw (binary weights) plus <stem>.json (config, epochs, seed, w_T).
void save_checkpoint(const std::filesystem::path& stem, const WeightMatrix& w, const nlohmann::ordered_json& sidecar);
Checkpoint load_checkpoint(const std::filesystem::path& weights_path);

}  // namespace amem
