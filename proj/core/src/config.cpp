#include "aeig/config.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace aeig {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error(join(messages)), messages_(std::move(messages)) {}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto solver_eq = [](const SolverOptions& x, const SolverOptions& y) {
    return x.max_iterations == y.max_iterations && x.patience == y.patience &&
           x.improvement_tolerance == y.improvement_tolerance &&
           x.projection_tolerance == y.projection_tolerance &&
           x.max_projection_iterations == y.max_projection_iterations &&
           x.initial_step == y.initial_step && x.warm_start == y.warm_start;
  };
  return a.graph == b.graph && a.n_robots == b.n_robots && a.horizon == b.horizon &&
         a.alpha == b.alpha && a.schedule == b.schedule && a.trials == b.trials &&
         a.base_seed == b.base_seed && a.strategies == b.strategies && a.planners == b.planners &&
         a.ground_truth == b.ground_truth && a.start_region == b.start_region &&
         solver_eq(a.solver, b.solver);
}

std::string_view to_string(DrawMode mode) {
  return mode == DrawMode::fixed ? "fixed" : "per_trial";
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  if (c.graph.n_regions == 0) errors.emplace_back("graph.n_regions: must be at least 1");
  const GraphReport report = validate(c.graph.build());
  for (const auto& p : report.problems) errors.push_back("graph: " + p);
  if (c.n_robots == 0) errors.emplace_back("n_robots: must be at least 1");
  if (c.horizon == 0) errors.emplace_back("horizon: must be at least 1");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) errors.emplace_back("alpha: must be positive");
  if (c.trials == 0) errors.emplace_back("trials: must be at least 1");
  if (c.strategies.empty()) errors.emplace_back("strategies: must list at least one strategy");
  if (c.planners.empty()) errors.emplace_back("planners: must list at least one planner");
  const auto& gt = c.ground_truth;
  if (!(gt.variance_high > gt.variance_low) || gt.variance_low < 0.0) {
    errors.emplace_back("ground_truth.variance_range: need 0 <= low < high");
  }
  if (!(gt.mean_high > gt.mean_low)) errors.emplace_back("ground_truth.mean_range: need low < high");
  if (c.start_region >= c.graph.n_regions) errors.emplace_back("start_region: outside the graph");
  if (c.solver.max_iterations < 0) errors.emplace_back("solver.max_iterations: must be >= 0");
  if (c.solver.patience < 1) errors.emplace_back("solver.patience: must be >= 1");
  if (!(c.solver.projection_tolerance > 0.0)) {
    errors.emplace_back("solver.projection_tolerance: must be positive");
  }
  if (c.solver.max_projection_iterations < 1) {
    errors.emplace_back("solver.max_projection_iterations: must be >= 1");
  }
  if (!(c.solver.initial_step > 0.0)) errors.emplace_back("solver.initial_step: must be positive");
  return errors;
}

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  // Rejects keys outside `allowed` under `node`.
  void check_keys(const YAML::Node& node, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!node.IsMap()) {
      errors_.push_back(where + ": expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        errors_.push_back((where.empty() ? "" : where + ".") + key + ": unknown key");
      }
    }
  }

  template <typename T>
  void read(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
    const YAML::Node value = node[key];
    if (!value) return;
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(path + ": cannot parse '" + YAML::Dump(value) + "'");
    }
  }

  template <typename T, typename Parse>
  void read_enum(const YAML::Node& node, const std::string& key, const std::string& path, T& out,
                 Parse parse) {
    const YAML::Node value = node[key];
    if (!value) return;
    try {
      out = parse(value.as<std::string>());
    } catch (const std::exception& e) {
      errors_.push_back(path + ": " + e.what());
    }
  }

  template <typename T, typename Parse>
  void read_enum_list(const YAML::Node& node, const std::string& key, const std::string& path,
                      std::vector<T>& out, Parse parse) {
    const YAML::Node value = node[key];
    if (!value) return;
    if (!value.IsSequence()) {
      errors_.push_back(path + ": expected a list");
      return;
    }
    out.clear();
    for (const auto& item : value) {
      try {
        out.push_back(parse(item.as<std::string>()));
      } catch (const std::exception& e) {
        errors_.push_back(path + ": " + e.what());
      }
    }
  }

  void read_range(const YAML::Node& node, const std::string& key, const std::string& path,
                  double& low, double& high) {
    const YAML::Node value = node[key];
    if (!value) return;
    if (!value.IsSequence() || value.size() != 2) {
      errors_.push_back(path + ": expected [low, high]");
      return;
    }
    try {
      low = value[0].as<double>();
      high = value[1].as<double>();
    } catch (const YAML::Exception&) {
      errors_.push_back(path + ": expected two numbers");
    }
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  std::vector<std::string> errors;
  if (!root || root.IsNull()) return c;
  Reader r(errors);
  r.check_keys(root, "",
               {"graph", "n_robots", "horizon", "alpha", "schedule", "trials", "base_seed",
                "strategies", "planners", "ground_truth", "start_region", "solver"});
  if (!errors.empty()) throw ConfigError(errors);

  if (const YAML::Node g = root["graph"]) {
    r.check_keys(g, "graph", {"n_regions", "edges", "self_loops"});
    r.read(g, "n_regions", "graph.n_regions", c.graph.n_regions);
    r.read(g, "self_loops", "graph.self_loops", c.graph.self_loops);
    if (const YAML::Node edges = g["edges"]) {
      c.graph.edges.clear();
      if (!edges.IsSequence()) {
        errors.emplace_back("graph.edges: expected a list of [a, b] pairs");
      } else {
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const YAML::Node pair = edges[e];
          if (!pair.IsSequence() || pair.size() != 2) {
            errors.push_back("graph.edges[" + std::to_string(e) + "]: expected [a, b]");
            continue;
          }
          try {
            c.graph.edges.emplace_back(pair[0].as<NodeIndex>(), pair[1].as<NodeIndex>());
          } catch (const YAML::Exception&) {
            errors.push_back("graph.edges[" + std::to_string(e) + "]: indices must be nonnegative integers");
          }
        }
      }
    }
  }
  r.read(root, "n_robots", "n_robots", c.n_robots);
  r.read(root, "horizon", "horizon", c.horizon);
  r.read(root, "alpha", "alpha", c.alpha);
  r.read_enum(root, "schedule", "schedule", c.schedule, parse_schedule_kind);
  r.read(root, "trials", "trials", c.trials);
  r.read(root, "base_seed", "base_seed", c.base_seed);
  r.read_enum_list(root, "strategies", "strategies", c.strategies, parse_strategy);
  r.read_enum_list(root, "planners", "planners", c.planners, parse_planner_kind);
  r.read(root, "start_region", "start_region", c.start_region);

  if (const YAML::Node gt = root["ground_truth"]) {
    r.check_keys(gt, "ground_truth",
                 {"variance_range", "mean_range", "scale_noise_by_robots", "draw_mode"});
    auto& s = c.ground_truth;
    r.read_range(gt, "variance_range", "ground_truth.variance_range", s.variance_low, s.variance_high);
    r.read_range(gt, "mean_range", "ground_truth.mean_range", s.mean_low, s.mean_high);
    r.read(gt, "scale_noise_by_robots", "ground_truth.scale_noise_by_robots", s.scale_noise_by_robots);
    r.read_enum(gt, "draw_mode", "ground_truth.draw_mode", s.draw_mode, [](const std::string& t) {
      if (t == "fixed") return DrawMode::fixed;
      if (t == "per_trial") return DrawMode::per_trial;
      throw std::invalid_argument("unknown draw mode '" + t + "' (expected fixed or per_trial)");
    });
  }
  if (const YAML::Node s = root["solver"]) {
    r.check_keys(s, "solver",
                 {"max_iterations", "patience", "improvement_tolerance", "projection_tolerance",
                  "max_projection_iterations", "initial_step", "warm_start"});
    r.read(s, "max_iterations", "solver.max_iterations", c.solver.max_iterations);
    r.read(s, "patience", "solver.patience", c.solver.patience);
    r.read(s, "improvement_tolerance", "solver.improvement_tolerance", c.solver.improvement_tolerance);
    r.read(s, "projection_tolerance", "solver.projection_tolerance", c.solver.projection_tolerance);
    r.read(s, "max_projection_iterations", "solver.max_projection_iterations",
           c.solver.max_projection_iterations);
    r.read(s, "initial_step", "solver.initial_step", c.solver.initial_step);
    r.read(s, "warm_start", "solver.warm_start", c.solver.warm_start);
  }
  if (!errors.empty()) throw ConfigError(errors);
  auto problems = validate_config(c);
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    std::vector<std::string> messages;
    for (const auto& m : e.messages()) messages.push_back(path.string() + ": " + m);
    throw ConfigError(messages);
  }
}

namespace {

// Shortest decimal form that parses back to the same double.
std::string shortest(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

}  // namespace

std::string write_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_regions" << YAML::Value << c.graph.n_regions;
  out << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& [a, b] : c.graph.edges) out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
  out << YAML::EndSeq;
  out << YAML::Key << "self_loops" << YAML::Value << c.graph.self_loops;
  out << YAML::EndMap;
  out << YAML::Key << "n_robots" << YAML::Value << c.n_robots;
  out << YAML::Key << "horizon" << YAML::Value << c.horizon;
  out << YAML::Key << "alpha" << YAML::Value << shortest(c.alpha);
  out << YAML::Key << "schedule" << YAML::Value << std::string(to_string(c.schedule));
  out << YAML::Key << "trials" << YAML::Value << c.trials;
  out << YAML::Key << "base_seed" << YAML::Value << c.base_seed;
  out << YAML::Key << "strategies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Strategy s : c.strategies) out << std::string(to_string(s));
  out << YAML::EndSeq;
  out << YAML::Key << "planners" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (PlannerKind p : c.planners) out << std::string(to_string(p));
  out << YAML::EndSeq;
  const auto& gt = c.ground_truth;
  out << YAML::Key << "ground_truth" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "variance_range" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << shortest(gt.variance_low) << shortest(gt.variance_high) << YAML::EndSeq;
  out << YAML::Key << "mean_range" << YAML::Value << YAML::Flow << YAML::BeginSeq << gt.mean_low
      << shortest(gt.mean_high) << YAML::EndSeq;
  out << YAML::Key << "scale_noise_by_robots" << YAML::Value << gt.scale_noise_by_robots;
  out << YAML::Key << "draw_mode" << YAML::Value << std::string(to_string(gt.draw_mode));
  out << YAML::EndMap;
  out << YAML::Key << "start_region" << YAML::Value << c.start_region;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_iterations" << YAML::Value << c.solver.max_iterations;
  out << YAML::Key << "patience" << YAML::Value << c.solver.patience;
  out << YAML::Key << "improvement_tolerance" << YAML::Value << shortest(c.solver.improvement_tolerance);
  out << YAML::Key << "projection_tolerance" << YAML::Value << shortest(c.solver.projection_tolerance);
  out << YAML::Key << "max_projection_iterations" << YAML::Value << c.solver.max_projection_iterations;
  out << YAML::Key << "initial_step" << YAML::Value << shortest(c.solver.initial_step);
  out << YAML::Key << "warm_start" << YAML::Value << c.solver.warm_start;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

namespace {

// Uniform on the half-open (low, high]: reflect [low, high) and reject exact low.
double draw_half_open(Rng& rng, double low, double high) {
  std::uniform_real_distribution<double> u(low, high);
  for (;;) {
    const double v = low + high - u(rng);
    if (v > low && v <= high) return v;
  }
}

}  // namespace

GroundTruth draw_ground_truth(const ExperimentConfig& config, std::uint64_t trial_seed) {
  const std::uint64_t seed =
      config.ground_truth.draw_mode == DrawMode::fixed ? config.base_seed : trial_seed;
  Rng rng = make_stream(seed, kGroundTruthStream);
  const auto& spec = config.ground_truth;
  const std::size_t n = config.graph.n_regions;
  GroundTruth truth{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    truth.variance[i] = draw_half_open(rng, spec.variance_low, spec.variance_high);
  }
  for (std::size_t i = 0; i < n; ++i) truth.mean[i] = draw_half_open(rng, spec.mean_low, spec.mean_high);
  if (spec.scale_noise_by_robots) {
    for (double& v : truth.variance) v *= static_cast<double>(config.n_robots);
  }
  return truth;
}

TrialSetup make_trial_setup(const ExperimentConfig& config, PlannerKind planner,
                            std::uint64_t trial_seed) {
  TrialSetup setup;
  setup.graph = config.graph.build();
  setup.truth = draw_ground_truth(config, trial_seed);
  setup.n_robots = config.n_robots;
  setup.horizon = config.horizon;
  setup.schedule = AnnealingSchedule{config.alpha, config.schedule};
  setup.planner = planner;
  setup.solver = config.solver;
  setup.start_region = config.start_region;
  return setup;
}

}  // namespace aeig
