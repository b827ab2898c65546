#include "aeig/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "json.hpp"

#ifndef AEIG_VERSION
#define AEIG_VERSION "unknown"
#endif

namespace aeig {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "results";
}

std::string code_version() { return AEIG_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::string out;
  char hex[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out += hex;
  }
  return out;
}

namespace {

std::string run_name(Strategy s, PlannerKind p) {
  return std::string(to_string(s)) + "_" + std::string(to_string(p));
}

std::string trial_file(Strategy s, PlannerKind p, std::size_t trial) {
  char name[32];
  std::snprintf(name, sizeof name, "trial_%04zu.csv", trial);
  return "trials/" + run_name(s, p) + "/" + name;
}

std::string aggregate_file(Strategy s, PlannerKind p) {
  return "aggregate/" + run_name(s, p) + ".csv";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << contents;
}

struct Task {
  std::size_t run = 0;
  Strategy strategy = Strategy::annealed;
  PlannerKind planner = PlannerKind::remc;
  std::size_t trial = 0;
};

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const fs::path& out_dir, unsigned jobs) {
  if (auto problems = validate_config(config); !problems.empty()) throw ConfigError(problems);
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  std::vector<std::pair<Strategy, PlannerKind>> runs;
  for (PlannerKind p : config.planners) {
    for (Strategy s : config.strategies) runs.emplace_back(s, p);
  }
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t t = 0; t < config.trials; ++t) tasks.push_back({r, runs[r].first, runs[r].second, t});
  }

  std::vector<std::vector<TrialMetrics>> metrics(runs.size(), std::vector<TrialMetrics>(config.trials));
  std::vector<std::string> digests(tasks.size());
  std::vector<char> done(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::optional<std::pair<std::size_t, RunFailure>> failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size() || abort.load()) return;
      const Task& task = tasks[idx];
      const std::uint64_t seed = trial_seed(config.base_seed, task.trial);
      try {
        const TrialSetup setup = make_trial_setup(config, task.planner, seed);
        TrialMetrics m = run_trial(setup, task.strategy, seed);
        std::ostringstream table;
        write_trial_table(table, task.strategy, task.planner, task.trial, m);
        const std::string text = table.str();
        write_file(out_dir / trial_file(task.strategy, task.planner, task.trial), text);
        digests[idx] = sha256_hex(text);
        metrics[task.run][task.trial] = std::move(m);
        done[idx] = 1;
      } catch (const std::exception& e) {
        RunFailure f{task.strategy, task.planner, task.trial, seed, std::nullopt, e.what()};
        if (const auto* tf = dynamic_cast<const TrialFailure*>(&e)) f.step = tf->step();
        std::lock_guard lock(failure_mutex);
        if (!failure || idx < failure->first) failure.emplace(idx, std::move(f));
        abort.store(true);
      }
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  json manifest;
  manifest["format"] = "aeig-results/1";
  manifest["code_version"] = code_version();
  manifest["config"] = write_config(config);
  manifest["quantile_rule"] = std::string(kQuantileRule);
  manifest["matrix_convention"] = "column-stochastic: P(i, j) = P(next = i | current = j)";
  manifest["seed_rule"] =
      "trial seed = base_seed + trial; ground-truth stream 0, robot a stream 1 + a; "
      "stream seed = splitmix64(splitmix64(seed) ^ stream * 0xD1B54A32D192ED03)";
  json files = json::object();
  json run_list = json::array();

  std::size_t written = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto [strategy, planner] = runs[r];
    json run;
    run["strategy"] = to_string(strategy);
    run["planner"] = to_string(planner);
    json trials = json::array();
    bool all_done = true;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::size_t idx = r * config.trials + t;
      json entry;
      entry["trial"] = t;
      entry["seed"] = trial_seed(config.base_seed, t);
      if (done[idx]) {
        const std::string file = trial_file(strategy, planner, t);
        entry["file"] = file;
        entry["chain_fallbacks"] = metrics[r][t].chain_fallbacks;
        files[file] = digests[idx];
        ++written;
      } else {
        all_done = false;
      }
      trials.push_back(entry);
    }
    run["trials"] = trials;
    if (all_done) {
      const QuartileSummary summary = aggregate_trials(metrics[r]);
      std::ostringstream table;
      write_aggregate_table(table, strategy, planner, summary);
      const std::string file = aggregate_file(strategy, planner);
      write_file(out_dir / file, table.str());
      files[file] = sha256_hex(table.str());
      run["aggregate"] = file;
    }
    run_list.push_back(run);
  }
  const std::string config_text = write_config(config);
  write_file(out_dir / "config.yaml", config_text);
  files["config.yaml"] = sha256_hex(config_text);

  RunReport report;
  report.directory = out_dir;
  report.trials_written = written;
  report.complete = !failure.has_value();
  if (failure) {
    report.failure = failure->second;
    const RunFailure& f = failure->second;
    json jf;
    jf["strategy"] = to_string(f.strategy);
    jf["planner"] = to_string(f.planner);
    jf["trial"] = f.trial;
    jf["seed"] = f.seed;
    jf["step"] = f.step ? json(*f.step) : json(nullptr);
    jf["message"] = f.message;
    manifest["failure"] = jf;
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["complete"] = report.complete;
  manifest["runs"] = run_list;
  manifest["files"] = files;
  manifest["wall_clock_seconds"] = report.wall_clock_seconds;
  manifest["jobs"] = n_workers;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return report;
}

namespace {

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace

const AggregateTable* BundleAggregates::find(Strategy s, PlannerKind p) const {
  for (const auto& t : tables) {
    if (t.strategy == s && t.planner == p) return &t;
  }
  return nullptr;
}

BundleAggregates load_bundle(const fs::path& dir) {
  const json manifest = read_manifest(dir);
  if (!manifest.value("complete", false)) {
    throw std::runtime_error(dir.string() + ": bundle is incomplete (see manifest.json failure entry)");
  }
  BundleAggregates bundle;
  bundle.config = parse_config(manifest.at("config").get<std::string>());
  for (const auto& run : manifest.at("runs")) {
    if (!run.contains("aggregate")) {
      throw std::runtime_error(dir.string() + ": run without aggregate table in manifest");
    }
    bundle.tables.push_back(read_aggregate_table(dir / run.at("aggregate").get<std::string>()));
  }
  return bundle;
}

double window_mean(const std::vector<double>& series, StepWindow w) {
  if (series.empty()) throw std::invalid_argument("window_mean: empty series");
  const std::size_t last = std::min(w.last, series.size() - 1);
  if (w.first > last) throw std::invalid_argument("window_mean: window outside the series");
  double total = 0.0;
  for (std::size_t k = w.first; k <= last; ++k) total += series[k];
  return total / static_cast<double>(last - w.first + 1);
}

double window_median(const std::vector<double>& series, StepWindow w) {
  if (series.empty()) throw std::invalid_argument("window_median: empty series");
  const std::size_t last = std::min(w.last, series.size() - 1);
  if (w.first > last) throw std::invalid_argument("window_median: window outside the series");
  return quantile(std::vector<double>(series.begin() + static_cast<std::ptrdiff_t>(w.first),
                                      series.begin() + static_cast<std::ptrdiff_t>(last) + 1),
                  0.5);
}

double fraction_leq(const std::vector<double>& a, const std::vector<double>& b, StepWindow w) {
  const std::size_t size = std::min(a.size(), b.size());
  if (size == 0) throw std::invalid_argument("fraction_leq: empty series");
  const std::size_t last = std::min(w.last, size - 1);
  if (w.first > last) throw std::invalid_argument("fraction_leq: window outside the series");
  std::size_t hits = 0;
  for (std::size_t k = w.first; k <= last; ++k) hits += a[k] <= b[k] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(last - w.first + 1);
}

void summarize(const fs::path& dir, std::ostream& os) {
  const BundleAggregates bundle = load_bundle(dir);
  const StepWindow window{};
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-20s %8s %14s %18s\n", "strategy", "planner", "trials",
                "final_h_med", "transient_h_med");
  os << line;
  const bool has_window = bundle.config.horizon > window.first;
  for (const auto& t : bundle.tables) {
    const auto& med = t.summary.h_true.median;
    std::snprintf(line, sizeof line, "%-10s %-20s %8zu %14.6f ",
                  std::string(to_string(t.strategy)).c_str(),
                  std::string(to_string(t.planner)).c_str(), t.summary.n_trials, med.back());
    os << line;
    if (has_window) {
      std::snprintf(line, sizeof line, "%18.6f\n", window_median(med, window));
    } else {
      std::snprintf(line, sizeof line, "%18s\n", "n/a");
    }
    os << line;
  }
  for (PlannerKind p : bundle.config.planners) {
    const AggregateTable* annealed = bundle.find(Strategy::annealed, p);
    const AggregateTable* direct = bundle.find(Strategy::direct, p);
    const AggregateTable* uniform = bundle.find(Strategy::uniform, p);
    const std::string tag = " [" + std::string(to_string(p)) + "]";
    if (annealed && direct && has_window) {
      const double frac = fraction_leq(annealed->summary.h_true.median, direct->summary.h_true.median, window);
      std::snprintf(line, sizeof line, "annealed <= direct on transient window [%zu, %zu] (%.1f%% of steps): %s",
                    window.first, window.last, 100.0 * frac, frac > 0.8 ? "PASS" : "FAIL");
      os << line << tag << '\n';
      const double gap_direct = window_mean(direct->summary.gap.median, window);
      const double gap_annealed = window_mean(annealed->summary.gap.median, window);
      std::snprintf(line, sizeof line, "direct overconfidence exceeds annealed (%.4f vs %.4f): %s",
                    gap_direct, gap_annealed, gap_direct > gap_annealed ? "PASS" : "FAIL");
      os << line << tag << '\n';
    }
    if (annealed && uniform) {
      const double a = annealed->summary.h_true.median.back();
      const double u = uniform->summary.h_true.median.back();
      std::snprintf(line, sizeof line, "annealed < uniform at final step (%.4f vs %.4f): %s", a, u,
                    a < u ? "PASS" : "FAIL");
      os << line << tag << '\n';
    }
  }
}

std::vector<std::string> verify_manifest(const fs::path& dir) {
  const json manifest = read_manifest(dir);
  std::vector<std::string> mismatches;
  for (const auto& [file, digest] : manifest.at("files").items()) {
    std::string actual;
    try {
      actual = sha256_hex(read_file(dir / file));
    } catch (const std::exception&) {
      mismatches.push_back(file + ": missing");
      continue;
    }
    if (actual != digest.get<std::string>()) mismatches.push_back(file + ": digest mismatch");
  }
  return mismatches;
}

TargetRequest parse_target_request(const std::string& text) {
  if (text == "uniform") return {TargetRequest::Kind::uniform, 0.0};
  if (text == "optimal") return {TargetRequest::Kind::optimal, 1.0};
  if (text.rfind("gibbs:", 0) == 0) {
    const std::string value = text.substr(6);
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(value, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !(beta >= 0.0)) {
      throw std::invalid_argument("gibbs target needs a nonnegative coldness, e.g. gibbs:0.5");
    }
    return {TargetRequest::Kind::gibbs, beta};
  }
  throw std::invalid_argument("unknown target '" + text + "' (expected uniform, optimal or gibbs:BETA)");
}

SynthesizedChain synthesize_chain(const ExperimentConfig& config, const TargetRequest& request) {
  if (auto problems = validate_config(config); !problems.empty()) throw ConfigError(problems);
  const RegionGraph graph = config.graph.build();
  const GroundTruth truth = draw_ground_truth(config, config.base_seed);
  SynthesizedChain out;
  switch (request.kind) {
    case TargetRequest::Kind::uniform: out.target = uniform_target(graph.size()); break;
    case TargetRequest::Kind::optimal: out.target = optimal_target(truth.variance); break;
    case TargetRequest::Kind::gibbs: out.target = gibbs_target(truth.variance, request.beta); break;
  }
  out.planner = config.planners.front();
  switch (out.planner) {
    case PlannerKind::remc: out.result = remc_solve(graph, out.target, config.solver); break;
    case PlannerKind::fmmc: out.result = fmmc_solve(graph, out.target, config.solver); break;
    case PlannerKind::metropolis_hastings: {
      TransitionMatrix p = metropolis_hastings(graph, out.target);
      out.result = ChainResult{p, validate_chain(p, graph, floor_target(out.target)), 0};
      break;
    }
  }
  return out;
}

}  // namespace aeig
