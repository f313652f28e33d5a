#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amem/cli.hpp"
#include "amem/config.hpp"
#include "amem/errors.hpp"
#include "amem/experiment.hpp"
#include "amem/table.hpp"

using namespace amem;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run amem_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "amem");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("amem-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("numbers are formatted in shortest round-trip form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::uint64_t{42}) == "42");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("tables reject ragged rows and separators") {
  Table t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK_THROWS(t.add_row({"1"}));
  CHECK_THROWS(t.add_row({"1,2", "3"}));
  CHECK(t.to_csv() == "a,b\n1,2\n");
}

TEST_CASE("config round-trips through json") {
  ExperimentConfig c;
  c.method = Method::kHebbian;
  c.n = 64;
  c.seeds = {3, 9};
  c.m = 12;
  c.goal = GoalParams::optimized_i();
  c.capacity.alpha_max = 0.5;
  c.stability.flips = {0.0, 0.25};
  c.landscape.axes[3] = {-1.0, 0.0, 1.0};
  const ExperimentConfig back = config_from_json(nlohmann::json::parse(dump_config(c)));
  CHECK(back == c);
  CHECK(dump_config(back) == dump_config(c));
}

TEST_CASE("config validation reports unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"N": 10, "bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"N": "ten"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"theta": 1.5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seeds": []})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"method": "oja"})")), ConfigError);
  CHECK_NOTHROW(config_from_json(nlohmann::json::parse(R"({"m": null, "alpha": 0.2})")));
}

TEST_CASE("generate, train and eval from the command line") {
  const fs::path dir = scratch("cli");
  const std::string pats = (dir / "p.txt").string();
  CHECK(amem_cli({"generate", "--out", pats, "-N", "30", "--m", "3", "--seed", "5"}).code == kExitOk);
  CHECK(load_patterns(pats).count() == 3);
  CHECK(amem_cli({"generate", "--out", pats}).code == kExitUsage);

  const fs::path run = dir / "train";
  const Run t = amem_cli({"train", "--method", "hebbian", "--patterns", pats, "-N", "30", "--out", run.string()});
  REQUIRE(t.code == kExitOk);
  for (const char* f : {"manifest.json", "config.json", "patterns.txt", "weights.amw", "weights.json"}) CHECK(fs::exists(run / f));
  const auto manifest = nlohmann::json::parse(slurp(run / "manifest.json"));
  CHECK(manifest.at("status") == "complete");
  CHECK(manifest.at("command") == "train");

  const Run e = amem_cli({"eval", "--checkpoint", (run / "weights.amw").string(), "--patterns", pats, "--flip-fraction", "0.1"});
  REQUIRE(e.code == kExitOk);
  const auto rec = nlohmann::json::parse(e.out);
  CHECK(rec.at("a_theta") == 1.0);
  CHECK(rec.at("flip_fraction") == 0.1);

  CHECK(amem_cli({"train", "--method", "hebbian", "-N", "30", "--out", run.string()}).code == kExitUsage);
  CHECK(amem_cli({"train", "--method", "hebbian", "-N", "30", "--out", run.string(), "--force"}).code == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("infomorphic training streams telemetry") {
  const fs::path dir = scratch("telemetry");
  const Run t = amem_cli({"train", "-N", "12", "--alpha", "0.5", "--epochs", "5", "--out", (dir / "r").string()});
  REQUIRE(t.code == kExitOk);
  const std::string tel = slurp(dir / "r" / "telemetry.csv");
  CHECK(tel.rfind("epoch,unq_R,unq_T,red,syn,res,goal,skipped,sampled_agreement\n", 0) == 0);
  CHECK(std::count(tel.begin(), tel.end(), '\n') == 6);
  const Checkpoint ck = load_checkpoint(dir / "r" / "weights.amw");
  CHECK(ck.weights.size() == 12);
  CHECK(ck.sidecar.at("epochs") == 5);
  fs::remove_all(dir);
}

TEST_CASE("usage and configuration errors exit with code 1") {
  const fs::path dir = scratch("errors");
  CHECK(amem_cli({}).code == kExitUsage);
  CHECK(amem_cli({"frobnicate"}).code == kExitUsage);
  CHECK(amem_cli({"capacity", "--jobs", "0"}).code == kExitUsage);
  CHECK(amem_cli({"capacity", "--config", (dir / "missing.json").string()}).code == kExitUsage);
  std::ofstream(dir / "bad.json") << "{\"N\": 10, \"extra\": true}";
  const Run bad = amem_cli({"capacity", "--config", (dir / "bad.json").string()});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("extra") != std::string::npos);
  CHECK(amem_cli({"eval"}).code == kExitUsage);
  CHECK(amem_cli({"--help"}).code == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("runtime failures exit with code 2 and mark the manifest") {
  const fs::path dir = scratch("runtime");
  std::ofstream(dir / "p.txt") << "1 -1\n";
  // pattern file dimension differs from N
  const Run r = amem_cli({"train", "--patterns", (dir / "p.txt").string(), "-N", "5", "--out", (dir / "r").string()});
  CHECK(r.code == kExitRuntime);
  CHECK(nlohmann::json::parse(slurp(dir / "r" / "manifest.json")).at("status") == "failed");
  fs::remove_all(dir);
}

TEST_CASE("default output directory honours the environment override") {
  const fs::path dir = scratch("root");
  ::setenv(kOutputRootEnv, dir.c_str(), 1);
  ExperimentConfig c;
  const fs::path p = default_output_dir("capacity", c);
  CHECK(p.parent_path() == dir);
  CHECK(p.filename().string().rfind("capacity-", 0) == 0);
  c.seeds = {7};
  CHECK(default_output_dir("capacity", c) != p);
  ::unsetenv(kOutputRootEnv);
  fs::remove_all(dir);
}

TEST_CASE("rerun from a manifest reproduces tables for any job count") {
  const fs::path dir = scratch("rerun");
  std::ofstream(dir / "c.json") << R"({"method": "hebbian", "N": 60, "seeds": [0, 1, 2],
    "capacity": {"alpha_step": 0.05, "alpha_start": 0.05, "alpha_max": 0.5, "resamples": 300}})";
  REQUIRE(amem_cli({"capacity", "--config", (dir / "c.json").string(), "--out", (dir / "a").string()}).code == kExitOk);
  REQUIRE(amem_cli({"rerun", (dir / "a" / "manifest.json").string(), "--jobs", "3", "--out", (dir / "b").string()}).code ==
          kExitOk);
  for (const char* f : {"capacity.csv", "capacity_loads.csv", "capacity_summary.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  fs::remove_all(dir);
}
