#include "caevo/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "caevo/compress.hpp"

namespace caevo {

namespace fs = std::filesystem;

void validate(const ExperimentConfig& c) {
  if (c.radius < 1 || c.radius > RuleTable::kMaxRadius) throw std::invalid_argument("radius out of range");
  if (c.width < static_cast<std::size_t>(2 * c.radius + 1)) throw std::invalid_argument("lattice narrower than the neighbourhood");
  if (c.task == Task::density && c.width % 2 == 0) throw std::invalid_argument("density task needs an odd lattice width");
  if (c.task == Task::chaos && c.steps < 1) throw std::invalid_argument("chaos task needs at least one step");
  if (c.epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  if (c.trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (c.batch == 0) throw std::invalid_argument("batch must be at least 1");
  if (c.trial_timeout_seconds < 0.0) throw std::invalid_argument("trial timeout must be >= 0");
  if (!c.optimizer.is_object()) throw std::invalid_argument("optimizer overrides must be an object");
  if (c.optimizer.contains("epochs") || c.optimizer.contains("seed")) {
    throw std::invalid_argument("epochs and seed are experiment settings, not optimizer overrides");
  }
  const OptimizerConfig opt = optimizer_config_from_json(c.optimizer);
  const std::size_t length = RuleTable::table_size(c.radius);
  if (c.algorithm == Algorithm::bglpso) {
    validate_pmf(opt.mutation_pmf, length);
    (void)neighborhood(0, opt.neighborhood_delta, opt.population, opt.topology);
  }
  if (c.algorithm == Algorithm::ga) {
    GAPopulation probe;
    probe.members.resize(opt.population);
    probe.elite_fraction = opt.elite_fraction;
    (void)probe.elite_count();
    if (opt.mutation_count > length) throw std::invalid_argument("mutation count exceeds rule table length");
  } else if (opt.population < 2) {
    throw std::invalid_argument("swarm size must be at least 2");
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {
      {"task", task_name(c.task)},
      {"algorithm", algorithm_name(c.algorithm)},
      {"radius", c.radius},
      {"n", c.width},
      {"t", c.steps},
      {"epochs", c.epochs},
      {"trials", c.trials},
      {"batch", c.batch},
      {"seed", c.seed},
      {"optimizer", c.optimizer},
      {"trial_timeout_seconds", c.trial_timeout_seconds},
  };
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "task") {
      c.task = parse_task(value.get<std::string>());
    } else if (key == "algorithm") {
      c.algorithm = parse_algorithm(value.get<std::string>());
    } else if (key == "radius") {
      c.radius = value.get<int>();
    } else if (key == "n") {
      c.width = value.get<std::size_t>();
    } else if (key == "t") {
      c.steps = value.get<std::size_t>();
    } else if (key == "epochs") {
      c.epochs = value.get<std::size_t>();
    } else if (key == "trials") {
      c.trials = value.get<std::size_t>();
    } else if (key == "batch") {
      c.batch = value.get<std::size_t>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "optimizer") {
      c.optimizer = value;
    } else if (key == "trial_timeout_seconds") {
      c.trial_timeout_seconds = value.get<double>();
    } else if (key == "output_dir") {
      c.output_dir = value.get<std::string>();
    } else {
      throw std::invalid_argument("unknown experiment config key: " + key);
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file " + file.string());
  return experiment_config_from_json(nlohmann::json::parse(in));
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t trial_index) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(trial_index));
}

OptimizerConfig optimizer_config_for(const ExperimentConfig& config, std::uint64_t seed) {
  OptimizerConfig opt = optimizer_config_from_json(config.optimizer);
  opt.epochs = config.epochs;
  opt.seed = derive_seed(seed, "optimizer");
  opt.workers = config.workers;
  return opt;
}

// ---------------------------------------------------------------------------
// Trial records

nlohmann::json to_json(const TrialResult& t) {
  nlohmann::json doc = {
      {"trial", t.trial_index},
      {"seed", t.seed},
      {"best_rule", t.best_rule},
      {"train_fitness", t.train_fitness},
      {"final_fitness", t.final_fitness},
      {"epochs_run", t.trajectory.size()},
      {"trajectory", t.trajectory},
      {"compressor", t.compressor},
      {"complete", t.complete},
  };
  if (!t.inertia.empty()) doc["inertia"] = t.inertia;
  if (t.failed()) doc["error"] = t.error;
  return doc;
}

TrialResult trial_from_json(const nlohmann::json& doc) {
  TrialResult t;
  t.trial_index = doc.at("trial").get<std::size_t>();
  t.seed = doc.at("seed").get<std::uint64_t>();
  t.best_rule = doc.at("best_rule").get<std::string>();
  t.train_fitness = doc.at("train_fitness").get<double>();
  t.final_fitness = doc.at("final_fitness").get<double>();
  t.trajectory = doc.at("trajectory").get<std::vector<double>>();
  t.compressor = doc.at("compressor").get<std::string>();
  t.complete = doc.at("complete").get<bool>();
  if (doc.contains("inertia")) t.inertia = doc.at("inertia").get<std::vector<double>>();
  if (doc.contains("error")) t.error = doc.at("error").get<std::string>();
  return t;
}

namespace {

// Shortest representation that round-trips, matching the JSON files.
std::string format_double(double v) { return nlohmann::json(v).dump(); }

std::string trial_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03zu", index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string trajectory_csv(const TrialResult& trial) {
  std::string csv = "epoch,best_fitness\n";
  for (std::size_t e = 0; e < trial.trajectory.size(); ++e) {
    csv += std::to_string(e + 1) + "," + format_double(trial.trajectory[e]) + "\n";
  }
  return csv;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

// ---------------------------------------------------------------------------
// Running

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();

  TrialResult result;
  result.trial_index = trial_index;
  result.seed = trial_seed(config, trial_index);
  result.compressor = compressor_id();

  const CaTaskSettings settings{config.task, config.radius, config.width, config.steps, config.batch};
  CaTaskObjective objective(settings, derive_seed(result.seed, "batches"));
  const OptimizerConfig opt = optimizer_config_for(config, result.seed);

  RunHooks hooks;
  if (config.trial_timeout_seconds > 0.0) {
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(config.trial_timeout_seconds));
    hooks.should_stop = [deadline] { return std::chrono::steady_clock::now() >= deadline; };
  }

  const SearchResult search = run_optimizer(config.algorithm, objective, objective.genome_length(), opt, hooks);
  result.trajectory = search.trajectory;
  result.inertia = search.inertia;
  result.complete = search.complete;
  if (!search.best.empty()) {
    result.best_rule = RuleTable(config.radius, search.best).to_hex();
    result.train_fitness = search.best_fitness;
    const ICBatch holdout = make_flat_batch(config.width, config.batch, derive_seed(result.seed, "holdout"));
    result.final_fitness = objective.evaluate_on(search.best, holdout);
  }
  result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentSummary summary;
  summary.config = config;
  summary.trials.resize(config.trials);

  // Spread threads over trials when there are enough of them, otherwise
  // hand them to the optimizer's evaluation loop.
  ExperimentConfig per_trial = config;
  const std::size_t trial_workers = std::min(config.workers, config.trials);
  per_trial.workers = trial_workers > 1 ? 1 : config.workers;

  parallel_for(config.trials, trial_workers, [&](std::size_t i) {
    try {
      summary.trials[i] = run_trial(per_trial, i);
    } catch (const std::exception& e) {
      TrialResult failed;
      failed.trial_index = i;
      failed.seed = trial_seed(config, i);
      failed.compressor = compressor_id();
      failed.complete = false;
      failed.error = e.what();
      summary.trials[i] = std::move(failed);
    }
  });

  std::vector<double> finals;
  std::vector<double> trains;
  for (const auto& t : summary.trials) {
    if (t.failed()) {
      summary.complete = false;
      continue;
    }
    if (!t.complete) summary.complete = false;
    if (t.best_rule.empty()) continue;
    finals.push_back(t.final_fitness);
    trains.push_back(t.train_fitness);
  }
  const MeanStd f = mean_std(finals);
  const MeanStd tr = mean_std(trains);
  summary.mean = f.mean;
  summary.stddev = f.stddev;
  summary.train_mean = tr.mean;
  summary.train_stddev = tr.stddev;

  if (!config.output_dir.empty()) write_artifacts(summary, config.output_dir);
  return summary;
}

nlohmann::json summary_to_json(const ExperimentSummary& s) {
  nlohmann::json trials = nlohmann::json::array();
  std::size_t completed = 0;
  for (const auto& t : s.trials) {
    const std::string stem = trial_stem(t.trial_index);
    nlohmann::json entry = {
        {"trial", t.trial_index},
        {"json", stem + ".json"},
        {"csv", stem + ".csv"},
        {"final_fitness", t.final_fitness},
        {"train_fitness", t.train_fitness},
        {"complete", t.complete},
    };
    if (t.failed()) entry["error"] = t.error;
    if (!t.failed() && t.complete) ++completed;
    trials.push_back(std::move(entry));
  }
  return {
      {"config", to_json(s.config)},
      {"compressor", compressor_id()},
      {"trials", trials},
      {"completed_trials", completed},
      {"complete", s.complete},
      {"mean", s.mean},
      {"stddev", s.stddev},
      {"train_mean", s.train_mean},
      {"train_stddev", s.train_stddev},
  };
}

void write_artifacts(const ExperimentSummary& summary, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "config.json", to_json(summary.config).dump(2) + "\n");
  nlohmann::json timing = nlohmann::json::object();
  for (const auto& t : summary.trials) {
    const std::string stem = trial_stem(t.trial_index);
    write_text(dir / (stem + ".json"), to_json(t).dump(2) + "\n");
    write_text(dir / (stem + ".csv"), trajectory_csv(t));
    timing[stem] = t.wall_clock_seconds;
  }
  write_text(dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace caevo
