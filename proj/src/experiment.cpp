#include "amem/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "amem/errors.hpp"

namespace amem {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw FormatError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path default_output_dir(const std::string& command, const ExperimentConfig& config) {
  const char* env = std::getenv(kOutputRootEnv);
  const fs::path root = env && *env ? fs::path(env) : fs::path("runs");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : command + "\n" + dump_config(config)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  return root / (command + "-" + buf);
}

Experiment::Experiment(fs::path root, std::string command, ExperimentConfig config, bool force)
    : root_(std::move(root)),
      command_(std::move(command)),
      config_(std::move(config)),
      started_(std::chrono::system_clock::now()),
      started_mono_(std::chrono::steady_clock::now()) {
  if (fs::exists(root_)) {
    if (!fs::is_directory(root_)) throw ConfigError("output path " + root_.string() + " is not a directory");
    if (!fs::is_empty(root_) && !force) {
      throw ConfigError("output directory " + root_.string() + " is not empty (use --force to overwrite)");
    }
  }
  fs::create_directories(root_);
  config_.output = root_.string();
  write_file_atomic(path("config.json"), dump_config(config_));
  write_manifest("running");
}

void Experiment::write_table(const std::string& name, const Table& table) {
  write_file_atomic(path(name), table.to_csv());
  add_artifact(name);
}

void Experiment::write_text(const std::string& name, const std::string& content) {
  write_file_atomic(path(name), content);
  add_artifact(name);
}

void Experiment::add_artifact(const std::string& name) {
  for (const auto& a : artifacts_) {
    if (a == name) return;
  }
  artifacts_.push_back(name);
}

void Experiment::set_result(const std::string& key, ordered_json value) { results_[key] = std::move(value); }

void Experiment::write_manifest(const std::string& status, const std::string& error) {
  const auto now = std::chrono::system_clock::now();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_mono_).count();
  ordered_json m;
  m["manifest_version"] = 1;
  m["tool"] = "amem";
  m["version"] = kVersion;
  m["command"] = command_;
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  m["started"] = iso_timestamp(started_);
  m["finished"] = status == "running" ? "" : iso_timestamp(now);
  m["wall_seconds"] = wall;
  m["seeds"] = config_.seeds;
  m["jobs"] = config_.jobs;
  m["config"] = to_json(config_);
  m["artifacts"] = artifacts_;
  m["results"] = results_;
  write_file_atomic(path("manifest.json"), m.dump(2) + "\n");
}

void save_checkpoint(const fs::path& stem, const WeightMatrix& w, const ordered_json& sidecar) {
  fs::path weights = stem;
  weights += ".amw";
  fs::path meta = stem;
  meta += ".json";
  save_weights(weights, w);
  ordered_json j = sidecar;
  j["format"] = "AMW1";
  j["N"] = w.size();
  write_file_atomic(meta, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& weights_path) {
  Checkpoint c{load_weights(weights_path), json::object()};
  fs::path meta = weights_path;
  meta.replace_extension(".json");
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    try {
      c.sidecar = json::parse(in);
    } catch (const json::parse_error& e) {
      throw FormatError("checkpoint sidecar " + meta.string() + " is not valid JSON: " + e.what());
    }
  }
  return c;
}

}  // namespace amem
