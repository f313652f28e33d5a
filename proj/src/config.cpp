#include "amem/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "amem/errors.hpp"

namespace amem {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* source_name(ExperimentConfig::Source s) {
  switch (s) {
    case ExperimentConfig::Source::kIid: return "iid";
    case ExperimentConfig::Source::kCorrelated: return "correlated";
    case ExperimentConfig::Source::kFile: return "file";
  }
  return "iid";
}

// Reads the members of one JSON object, rejecting wrong types and, on
// finish(), any key that was never read.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(label() + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  void read(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(label(key) + "expected a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(label(key) + "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(label(key) + "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) out = unsigned_value(*v, key);
  }
  void read(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(label(key) + "expected an integer");
      out = v->get<int>();
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(label(key) + "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(label(key) + "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void read(const char* key, std::vector<std::uint64_t>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(label(key) + "expected an array of non-negative integers");
      out.clear();
      for (const auto& e : *v) out.push_back(unsigned_value(e, key));
    }
  }
  void read(const char* key, std::array<double, 5>& out) {
    std::vector<double> v(out.begin(), out.end());
    if (!has(key)) return;
    read(key, v);
    if (v.size() != 5) throw ConfigError(label(key) + "expected 5 numbers");
    std::copy(v.begin(), v.end(), out.begin());
  }
  void read_size(const char* key, std::size_t& out) {
    std::uint64_t v = out;
    read(key, v);
    out = static_cast<std::size_t>(v);
  }

  void skip(const char* key) { take(key); }

  Section sub(const char* key) {
    const json* v = take(key);
    static const json empty = json::object();
    return Section(v ? *v : empty, where_ + key + ".");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + where_ + it.key() + "'");
    }
  }

 private:
  const json* take(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }
  std::string label(const char* key = "") const { return "config '" + where_ + key + "': "; }
  std::uint64_t unsigned_value(const json& v, const char* key) const {
    if (!v.is_number_unsigned()) throw ConfigError(label(key) + "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

ordered_json goal_json(const GoalParams& g) {
  return ordered_json{{"unq_R", g.unq_r}, {"unq_T", g.unq_t}, {"red", g.red}, {"syn", g.syn}, {"res", g.res}};
}

void read_goal(Section s, GoalParams& g) {
  s.read("unq_R", g.unq_r);
  s.read("unq_T", g.unq_t);
  s.read("red", g.red);
  s.read("syn", g.syn);
  s.read("res", g.res);
  s.finish();
}

constexpr const char* kGoalKeys[5] = {"unq_R", "unq_T", "red", "syn", "res"};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n >= 2, "N must be >= 2");
  require(w_t > 0.0 && std::isfinite(w_t), "w_T must be > 0");
  require(lambda_r >= 0.0 && std::isfinite(lambda_r), "lambda_r must be >= 0");
  require(optimizer == "adam", "optimizer must be \"adam\"");
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0,
          "Adam betas must be in [0, 1)");
  require(adam.epsilon > 0.0, "Adam epsilon must be > 0");
  require(eta > 0.0 && std::isfinite(eta), "eta must be > 0");
  require(reps >= 1, "reps must be >= 1");
  try {
    binning.validate();
    goal.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  require(n_iter >= 1, "N_iter must be >= 1");
  require(theta > 0.0 && theta <= 1.0, "theta must be in (0, 1]");
  require(persistence >= 0.0 && persistence <= 1.0, "persistence must be in [0, 1]");
  require(source != Source::kFile || !pattern_file.empty(), "pattern source \"file\" needs patterns.file");
  require(!m || *m >= 1, "m must be >= 1");
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be > 0");
  require(!seeds.empty(), "seeds must be nonempty");
  require(jobs >= 1, "jobs must be >= 1");
  require(flip_fraction >= 0.0 && flip_fraction <= 1.0, "flip_fraction must be in [0, 1]");
  require(capacity.alpha_step > 0.0, "capacity.alpha_step must be > 0");
  require(capacity.alpha_start > 0.0 && capacity.alpha_max >= capacity.alpha_start,
          "capacity needs 0 < alpha_start <= alpha_max");
  require(capacity.resamples >= 1, "capacity.resamples must be >= 1");
  require(!stability.alphas.empty() && !stability.flips.empty(), "stability grids must be nonempty");
  for (double f : stability.flips) require(f >= 0.0 && f <= 1.0, "stability flips must be in [0, 1]");
  for (double a : stability.alphas) require(a > 0.0, "stability alphas must be > 0");
  require(!profile.alphas.empty(), "profile.alphas must be nonempty");
  for (double a : profile.alphas) require(a > 0.0, "profile alphas must be > 0");
  for (const auto& axis : landscape.axes) require(!axis.empty(), "landscape axes must be nonempty");
  require(optimize.sigma0 > 0.0, "optimize.sigma0 must be > 0");
  for (std::size_t k = 0; k < 5; ++k) require(optimize.lower[k] <= optimize.upper[k], "optimize.lower must be <= upper");
}

std::size_t ExperimentConfig::pattern_count() const { return m ? *m : patterns_at(n, alpha); }

TrainConfig ExperimentConfig::train_config(std::uint64_t seed) const {
  TrainConfig t;
  t.epochs = epochs;
  t.reps = reps;
  t.eta = eta;
  t.lambda_r = lambda_r;
  t.w_t = w_t;
  t.goal = goal;
  t.binning = binning;
  t.adam = adam;
  t.seed = seed;
  t.jobs = 1;
  t.bin_gradient = bin_gradient;
  return t;
}

Trainer ExperimentConfig::trainer() const { return {method, train_config(0)}; }

PatternSource ExperimentConfig::pattern_source() const {
  PatternSource s;
  s.kind = source == Source::kCorrelated ? PatternSource::Kind::kCorrelated : PatternSource::Kind::kIid;
  s.persistence = persistence;
  return s;
}

RecallOptions ExperimentConfig::recall_options() const {
  return {n_iter, sequential ? UpdateMode::kSequential : UpdateMode::kSynchronous};
}

CapacityConfig ExperimentConfig::capacity_config() const {
  CapacityConfig c;
  c.trainer = trainer();
  c.source = pattern_source();
  c.n = n;
  c.alpha_step = capacity.alpha_step;
  c.alpha_start = capacity.alpha_start;
  c.alpha_max = capacity.alpha_max;
  c.recall = recall_options();
  c.threshold = capacity.threshold;
  c.finite_size_limit = capacity.finite_size_limit;
  c.stop_at_failure = capacity.stop_at_failure;
  c.resamples = capacity.resamples;
  c.bootstrap_seed = capacity.bootstrap_seed;
  c.jobs = jobs;
  return c;
}

StabilityConfig ExperimentConfig::stability_config() const {
  StabilityConfig c;
  c.trainer = trainer();
  c.source = pattern_source();
  c.n = n;
  c.alphas = stability.alphas;
  c.flips = stability.flips;
  c.recall = recall_options();
  c.epsilon = stability.epsilon;
  c.jobs = jobs;
  return c;
}

ProfileConfig ExperimentConfig::profile_config() const {
  ProfileConfig c;
  c.trainer = trainer();
  c.source = pattern_source();
  c.n = n;
  c.alphas = profile.alphas;
  c.recall = recall_options();
  c.theta = theta;
  c.jobs = jobs;
  return c;
}

OptimizeConfig ExperimentConfig::optimize_config() const {
  OptimizeConfig c;
  c.capacity = capacity_config();
  c.budget = optimize.budget;
  c.sigma0 = optimize.sigma0;
  c.lower = optimize.lower;
  c.upper = optimize.upper;
  c.start = optimize.start;
  c.search_seed = optimize.search_seed;
  c.train_seed = seeds.front();
  c.validation_seeds = optimize.validation_seeds;
  return c;
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["method"] = to_string(c.method);
  j["N"] = c.n;
  j["w_T"] = c.w_t;
  j["lambda_r"] = c.lambda_r;
  j["optimizer"] = {{"name", c.optimizer}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}};
  j["eta"] = c.eta;
  j["epochs"] = c.epochs;
  j["reps"] = c.reps;
  j["n_t"] = c.binning.n_t;
  j["n_r"] = c.binning.n_r;
  j["sigma_t"] = c.binning.sigma_t;
  j["sigma_r"] = c.binning.sigma_r;
  j["padding"] = c.binning.padding;
  j["sequential"] = c.sequential;
  j["N_iter"] = c.n_iter;
  j["theta"] = c.theta;
  j["bin_gradient"] = c.bin_gradient;
  j["goal"] = goal_json(c.goal);
  j["patterns"] = {{"source", source_name(c.source)}, {"persistence", c.persistence}, {"file", c.pattern_file}};
  if (c.m) j["m"] = *c.m;
  j["alpha"] = c.alpha;
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  j["jobs"] = c.jobs;
  j["flip_fraction"] = c.flip_fraction;
  j["capacity"] = {{"alpha_step", c.capacity.alpha_step},
                   {"alpha_start", c.capacity.alpha_start},
                   {"alpha_max", c.capacity.alpha_max},
                   {"threshold", c.capacity.threshold},
                   {"finite_size_limit", c.capacity.finite_size_limit},
                   {"stop_at_failure", c.capacity.stop_at_failure},
                   {"resamples", c.capacity.resamples},
                   {"bootstrap_seed", c.capacity.bootstrap_seed}};
  j["stability"] = {{"alphas", c.stability.alphas}, {"flips", c.stability.flips}, {"epsilon", c.stability.epsilon}};
  j["profile"] = {{"alphas", c.profile.alphas}};
  ordered_json axes;
  for (std::size_t k = 0; k < 5; ++k) axes[kGoalKeys[k]] = c.landscape.axes[k];
  j["landscape"] = axes;
  j["optimize"] = {{"budget", c.optimize.budget},
                   {"sigma0", c.optimize.sigma0},
                   {"lower", c.optimize.lower},
                   {"upper", c.optimize.upper},
                   {"start", c.optimize.start},
                   {"search_seed", c.optimize.search_seed},
                   {"validation_seeds", c.optimize.validation_seeds}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Section s(j, "");
  std::string method = to_string(c.method);
  s.read("method", method);
  try {
    c.method = parse_method(method);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  s.read_size("N", c.n);
  s.read("w_T", c.w_t);
  s.read("lambda_r", c.lambda_r);
  {
    Section o = s.sub("optimizer");
    o.read("name", c.optimizer);
    o.read("beta1", c.adam.beta1);
    o.read("beta2", c.adam.beta2);
    o.read("epsilon", c.adam.epsilon);
    o.finish();
  }
  s.read("eta", c.eta);
  s.read_size("epochs", c.epochs);
  s.read_size("reps", c.reps);
  s.read_size("n_t", c.binning.n_t);
  s.read_size("n_r", c.binning.n_r);
  s.read("sigma_t", c.binning.sigma_t);
  s.read("sigma_r", c.binning.sigma_r);
  s.read("padding", c.binning.padding);
  s.read("sequential", c.sequential);
  s.read("N_iter", c.n_iter);
  s.read("theta", c.theta);
  s.read("bin_gradient", c.bin_gradient);
  read_goal(s.sub("goal"), c.goal);
  {
    Section p = s.sub("patterns");
    std::string source = source_name(c.source);
    p.read("source", source);
    if (source == "iid") {
      c.source = ExperimentConfig::Source::kIid;
    } else if (source == "correlated") {
      c.source = ExperimentConfig::Source::kCorrelated;
    } else if (source == "file") {
      c.source = ExperimentConfig::Source::kFile;
    } else {
      throw ConfigError("config 'patterns.source': expected iid, correlated or file");
    }
    p.read("persistence", c.persistence);
    p.read("file", c.pattern_file);
    p.finish();
  }
  if (s.has("m") && !j.at("m").is_null()) {
    std::size_t m = 0;
    s.read_size("m", m);
    c.m = m;
  } else {
    s.skip("m");
  }
  s.read("alpha", c.alpha);
  s.read("seeds", c.seeds);
  s.read("output", c.output);
  s.read_size("jobs", c.jobs);
  s.read("flip_fraction", c.flip_fraction);
  {
    Section cap = s.sub("capacity");
    cap.read("alpha_step", c.capacity.alpha_step);
    cap.read("alpha_start", c.capacity.alpha_start);
    cap.read("alpha_max", c.capacity.alpha_max);
    cap.read("threshold", c.capacity.threshold);
    cap.read("finite_size_limit", c.capacity.finite_size_limit);
    cap.read("stop_at_failure", c.capacity.stop_at_failure);
    cap.read_size("resamples", c.capacity.resamples);
    cap.read("bootstrap_seed", c.capacity.bootstrap_seed);
    cap.finish();
  }
  {
    Section st = s.sub("stability");
    st.read("alphas", c.stability.alphas);
    st.read("flips", c.stability.flips);
    st.read("epsilon", c.stability.epsilon);
    st.finish();
  }
  {
    Section pr = s.sub("profile");
    pr.read("alphas", c.profile.alphas);
    pr.finish();
  }
  {
    Section ls = s.sub("landscape");
    for (std::size_t k = 0; k < 5; ++k) ls.read(kGoalKeys[k], c.landscape.axes[k]);
    ls.finish();
  }
  {
    Section op = s.sub("optimize");
    op.read_size("budget", c.optimize.budget);
    op.read("sigma0", c.optimize.sigma0);
    op.read("lower", c.optimize.lower);
    op.read("upper", c.optimize.upper);
    op.read("start", c.optimize.start);
    op.read("search_seed", c.optimize.search_seed);
    op.read("validation_seeds", c.optimize.validation_seeds);
    op.finish();
  }
  s.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("config")) throw ConfigError("manifest " + path.string() + " has no config");
    return config_from_json(j.at("config"));
  }
  return config_from_json(j);
}

std::string dump_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace amem
