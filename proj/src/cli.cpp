#include "amem/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "amem/config.hpp"
#include "amem/errors.hpp"
#include "amem/experiment.hpp"
#include "amem/harness.hpp"
#include "amem/infomorphic.hpp"
#include "amem/table.hpp"

namespace amem {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::optional<std::size_t> jobs;
  bool force = false;
  std::optional<double> flip_fraction;
  std::optional<double> theta;
  std::string method;
  std::optional<std::size_t> epochs;
  std::optional<double> alpha;
  std::optional<std::size_t> m;
  std::optional<std::size_t> n;
  std::string checkpoint;
  std::string patterns;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file or run manifest");
  sub->add_option("--seed", o.seed, "single seed (replaces the seed list)");
  sub->add_option("--seeds", o.seeds, "comma-separated seed list")->delimiter(',');
  sub->add_option("--out", o.out, "output directory (file for generate)");
  sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--force", o.force, "allow writing into a non-empty output directory");
  sub->add_option("--flip-fraction", o.flip_fraction, "fraction of flipped bits in recall cues");
  sub->add_option("--theta", o.theta, "threshold for a_theta");
  sub->add_option("--method", o.method, "hebbian or infomorphic");
  sub->add_option("--epochs", o.epochs, "training epochs");
  sub->add_option("--alpha", o.alpha, "memory load m/N");
  sub->add_option("--m", o.m, "number of patterns (overrides --alpha)");
  sub->add_option("-N,--neurons", o.n, "network size N")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.seed) c.seeds = {*o.seed};
  if (o.jobs) c.jobs = *o.jobs;
  if (o.flip_fraction) c.flip_fraction = *o.flip_fraction;
  if (o.theta) c.theta = *o.theta;
  if (!o.method.empty()) {
    try {
      c.method = parse_method(o.method);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.epochs) c.epochs = *o.epochs;
  if (o.n) c.n = *o.n;
  if (o.alpha) {
    c.alpha = *o.alpha;
    c.m.reset();
  }
  if (o.m) c.m = *o.m;
  if (!o.patterns.empty()) {
    c.source = ExperimentConfig::Source::kFile;
    c.pattern_file = o.patterns;
  }
  if (!o.out.empty()) c.output = o.out;
  c.validate();
  return c;
}

PatternSet resolve_patterns(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.source == ExperimentConfig::Source::kFile) {
    PatternSet p = load_patterns(c.pattern_file);
    if (p.size() != c.n) {
      throw DimensionError("pattern file " + c.pattern_file + " has N=" + std::to_string(p.size()) +
                           " but the config has N=" + std::to_string(c.n));
    }
    return p;
  }
  const std::size_t m = c.pattern_count();
  return make_patterns(c.pattern_source(), m, c.n, pattern_key(seed, c.n, m));
}

ordered_json capacity_json(const CapacityResult& r) {
  return {{"alpha_c_median", r.alpha_c}, {"ci_lo", r.ci95.first}, {"ci_hi", r.ci95.second}, {"per_seed", r.per_seed}};
}

fs::path output_dir(const std::string& command, const ExperimentConfig& c) {
  return c.output.empty() ? default_output_dir(command, c) : fs::path(c.output);
}

// Each command is split into setup (config errors, exit 1) and a body that
// runs inside the experiment (runtime errors, exit 2).
using Body = std::function<void(Experiment&, const ExperimentConfig&)>;

int run_experiment(const std::string& command, const ExperimentConfig& c, bool force, const Body& body,
                   std::ostream& out, std::ostream& err) {
  std::optional<Experiment> exp;
  try {
    exp.emplace(output_dir(command, c), command, c, force);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  try {
    body(*exp, c);
    exp->write_manifest("complete");
  } catch (const Interrupted& e) {
    exp->write_manifest("interrupted", e.what());
    err << "interrupted; partial results in " << exp->root().string() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    exp->write_manifest("failed", e.what());
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  out << exp->root().string() << "\n";
  return kExitOk;
}

void body_train(Experiment& exp, const ExperimentConfig& c) {
  const std::uint64_t seed = c.seeds.front();
  const PatternSet patterns = resolve_patterns(c, seed);
  save_patterns(exp.path("patterns.txt"), patterns);
  exp.add_artifact("patterns.txt");
  ordered_json sidecar{{"method", to_string(c.method)}, {"seed", seed}, {"config", to_json(c)}};
  WeightMatrix w(c.n);
  if (c.method == Method::kHebbian) {
    w = hebbian_train(patterns);
    sidecar["epochs"] = 0;
    sidecar["w_T"] = nullptr;
  } else {
    const std::uint64_t key = training_key(seed, c.n, patterns.count());
    TrainConfig tc = c.train_config(key);
    tc.jobs = c.jobs;
    std::ofstream tel(exp.path("telemetry.csv"), std::ios::binary);
    if (!tel) throw FormatError("cannot write telemetry.csv");
    exp.add_artifact("telemetry.csv");
    tel << "epoch,unq_R,unq_T,red,syn,res,goal,skipped,sampled_agreement\n";
    auto on_epoch = [&](const EpochTelemetry& t) {
      tel << t.epoch << ',' << format_number(t.mean_atoms.unq_r) << ',' << format_number(t.mean_atoms.unq_t) << ','
          << format_number(t.mean_atoms.red) << ',' << format_number(t.mean_atoms.syn) << ','
          << format_number(t.mean_atoms.res) << ',' << format_number(t.mean_goal) << ',' << t.skipped << ','
          << format_number(t.sampled_agreement) << '\n';
      tel.flush();
    };
    TrainResult r = train_infomorphic(patterns, tc, on_epoch);
    w = r.net.w_r;
    sidecar["epochs"] = c.epochs;
    sidecar["w_T"] = r.net.w_t;
  }
  save_checkpoint(exp.path("weights"), w, sidecar);
  exp.add_artifact("weights.amw");
  exp.add_artifact("weights.json");
  const RecallStats s = evaluate_recall(w, patterns, c.theta, 0.0, 0, c.recall_options());
  exp.set_result("a_cos", s.a_cos);
  exp.set_result("a_theta", s.a_theta);
  exp.set_result("m", patterns.count());
}

void body_capacity(Experiment& exp, const ExperimentConfig& c) {
  const CapacityResult r = estimate_capacity(c.capacity_config(), c.seeds);
  exp.write_table("capacity.csv", capacity_table(c.method, r));
  exp.write_table("capacity_loads.csv", capacity_loads_table(c.method, r));
  Table summary({"method", "alpha_c_median", "ci_lo", "ci_hi", "seeds"});
  summary.add_row({to_string(c.method), format_number(r.alpha_c), format_number(r.ci95.first),
                   format_number(r.ci95.second), format_number(static_cast<std::uint64_t>(c.seeds.size()))});
  exp.write_table("capacity_summary.csv", summary);
  exp.set_result("capacity", capacity_json(r));
}

void body_stability(Experiment& exp, const ExperimentConfig& c) {
  const auto points = stability_profile(c.stability_config(), c.seeds);
  exp.write_table("stability.csv", stability_table(points));
}

void body_pid_profile(Experiment& exp, const ExperimentConfig& c) {
  const auto rows = pid_profile(c.profile_config(), c.seeds);
  exp.write_table("pid_profile.csv", profile_table(rows));
  exp.write_table("pid_profile_bands.csv", profile_band_table(profile_bands(rows)));
}

void body_landscape(Experiment& exp, const ExperimentConfig& c) {
  const auto goals = goal_grid(c.landscape.axes);
  const auto points = goal_landscape(c.capacity_config(), goals, c.seeds);
  exp.write_table("landscape.csv", landscape_table(points));
}

void body_optimize(Experiment& exp, const ExperimentConfig& c) {
  const OptimizeResult r = optimize_goal(c.optimize_config());
  exp.write_table("optimize_history.csv", optimize_history_table(r.history));
  Table best({"g_unq_R", "g_unq_T", "g_red", "g_syn", "g_res", "search_alpha_c", "alpha_c_median", "ci_lo", "ci_hi"});
  const bool validated = !r.validation.per_seed.empty();
  best.add_row({format_number(r.best.unq_r), format_number(r.best.unq_t), format_number(r.best.red),
                format_number(r.best.syn), format_number(r.best.res), format_number(r.search_alpha_c),
                validated ? format_number(r.validation.alpha_c) : "nan",
                validated ? format_number(r.validation.ci95.first) : "nan",
                validated ? format_number(r.validation.ci95.second) : "nan"});
  exp.write_table("optimize_result.csv", best);
  exp.set_result("best_goal", ordered_json{{"unq_R", r.best.unq_r},
                                           {"unq_T", r.best.unq_t},
                                           {"red", r.best.red},
                                           {"syn", r.best.syn},
                                           {"res", r.best.res}});
  if (validated) exp.set_result("validation", capacity_json(r.validation));
}

const std::vector<std::pair<std::string, Body>>& experiment_commands() {
  static const std::vector<std::pair<std::string, Body>> table{
      {"train", body_train},           {"capacity", body_capacity},   {"stability", body_stability},
      {"pid-profile", body_pid_profile}, {"landscape", body_landscape}, {"optimize", body_optimize},
  };
  return table;
}

int cmd_generate(const ExperimentConfig& c, const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) {
    err << "error: generate needs --out FILE\n";
    return kExitUsage;
  }
  if (c.source == ExperimentConfig::Source::kFile) {
    err << "error: generate needs an iid or correlated pattern source\n";
    return kExitUsage;
  }
  if (fs::exists(o.out) && !o.force) {
    err << "error: " << o.out << " exists (use --force to overwrite)\n";
    return kExitUsage;
  }
  try {
    save_patterns(o.out, resolve_patterns(c, c.seeds.front()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  out << o.out << "\n";
  return kExitOk;
}

int cmd_eval(const ExperimentConfig& c, const Options& o, std::ostream& out, std::ostream& err) {
  if (o.checkpoint.empty()) {
    err << "error: eval needs --checkpoint FILE\n";
    return kExitUsage;
  }
  if (!fs::exists(o.checkpoint)) {
    err << "error: checkpoint " << o.checkpoint << " not found\n";
    return kExitUsage;
  }
  if (c.source == ExperimentConfig::Source::kFile && !fs::exists(c.pattern_file)) {
    err << "error: pattern file " << c.pattern_file << " not found\n";
    return kExitUsage;
  }
  ordered_json record;
  try {
    const Checkpoint ck = load_checkpoint(o.checkpoint);
    ExperimentConfig cc = c;
    cc.n = ck.weights.size();
    const PatternSet patterns = resolve_patterns(cc, c.seeds.front());
    const RecallStats s =
        evaluate_recall(ck.weights, patterns, c.theta, c.flip_fraction, c.seeds.front(), c.recall_options());
    record = {{"checkpoint", o.checkpoint},
              {"N", ck.weights.size()},
              {"m", patterns.count()},
              {"theta", c.theta},
              {"flip_fraction", c.flip_fraction},
              {"seed", c.seeds.front()},
              {"a_cos", s.a_cos},
              {"a_theta", s.a_theta}};
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  if (!o.out.empty()) {
    return run_experiment(
        "eval", c, o.force, [&](Experiment& exp, const ExperimentConfig&) {
          exp.write_text("eval.json", record.dump(2) + "\n");
          exp.set_result("eval", record);
        },
        out, err);
  }
  out << record.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"amem: Hopfield associative memories trained by Hebbian or infomorphic rules"};
  app.require_subcommand(1);
  Options o;
  std::string manifest;

  CLI::App* generate = app.add_subcommand("generate", "write a pattern file");
  add_common(generate, o);
  CLI::App* eval = app.add_subcommand("eval", "recall accuracy of a checkpoint");
  add_common(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "weights file (.amw)");
  eval->add_option("--patterns", o.patterns, "pattern file (default: generate from the config)");

  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"train", "train one network and write a checkpoint"},
      {"capacity", "capacity scan over memory loads"},
      {"stability", "largest recoverable flip fraction per load"},
      {"pid-profile", "PID atoms and accuracy versus memory load"},
      {"landscape", "capacity over a grid of goal coefficients"},
      {"optimize", "CMA-ES search over goal coefficients"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    add_common(sub, o);
    if (name == "train") sub->add_option("--patterns", o.patterns, "pattern file (default: generate from the config)");
    subs.push_back(sub);
  }
  CLI::App* rerun = app.add_subcommand("rerun", "repeat the run recorded in a manifest");
  rerun->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  rerun->add_option("--out", o.out, "output directory");
  rerun->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  rerun->add_flag("--force", o.force, "allow writing into a non-empty output directory");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string command;
  ExperimentConfig config;
  try {
    if (rerun->parsed()) {
      std::ifstream in(manifest);
      if (!in) throw ConfigError("cannot read manifest " + manifest);
      json m;
      try {
        m = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("manifest " + manifest + " is not valid JSON: " + e.what());
      }
      if (!m.is_object() || !m.contains("command") || !m.contains("config") || !m.at("command").is_string()) {
        throw ConfigError("manifest " + manifest + " lacks command or config");
      }
      command = m.at("command").get<std::string>();
      config = config_from_json(m.at("config"));
      config.output = o.out;
      if (o.jobs) config.jobs = *o.jobs;
      config.validate();
      if (command == "eval" || command == "generate") throw ConfigError("rerun supports experiment commands only");
    } else {
      for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();
      config = resolve_config(o);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (command == "generate") return cmd_generate(config, o, out, err);
  if (command == "eval") return cmd_eval(config, o, out, err);
  if (command == "train" && config.source == ExperimentConfig::Source::kFile && !fs::exists(config.pattern_file)) {
    err << "error: pattern file " << config.pattern_file << " not found\n";
    return kExitUsage;
  }
  for (const auto& [name, body] : experiment_commands()) {
    if (name == command) return run_experiment(name, config, o.force, body, out, err);
  }
  err << "error: unknown command " << command << "\n";
  return kExitUsage;
}

}  // namespace amem
