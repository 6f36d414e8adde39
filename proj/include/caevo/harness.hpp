#pragma once

// Seeded multi-trial experiments: one optimizer on one CA task, repeated over
// independent trials, with every artifact persisted as JSON/CSV.
//
// Output directory layout:
//   config.json          experiment config (rerunnable)
//   trial_NNN.json       per-trial metadata, best rule, fitness values
//   trial_NNN.csv        epoch,best_fitness
//   summary.json         aggregate statistics and per-trial references
//
// All of the above are deterministic given the config. Wall-clock times go
// to timing.json, which is not.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "caevo/objectives.hpp"
#include "caevo/optimizers.hpp"
#include "json.hpp"

namespace caevo {

struct ExperimentConfig {
  Task task = Task::density;
  Algorithm algorithm = Algorithm::ga;
  int radius = 3;
  std::size_t width = 149;
  std::size_t steps = 150;
  std::size_t epochs = 200;
  std::size_t trials = 10;
  std::size_t batch = 100;
  std::uint64_t seed = 0;
  // Optimizer parameter overrides, keys as in OptimizerConfig's JSON form
  // (epochs and seed are owned by the experiment and rejected here).
  nlohmann::json optimizer = nlohmann::json::object();
  // 0 disables the per-trial wall-clock limit.
  double trial_timeout_seconds = 0.0;
  std::filesystem::path output_dir;

  // Execution only; never serialized, never affects results.
  std::size_t workers = 1;
};

// Throws std::invalid_argument on inconsistent settings (even width for the
// density task, zero trials, bad overrides, ...).
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
// Unknown keys are rejected. Missing keys keep their defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t trial_index);
OptimizerConfig optimizer_config_for(const ExperimentConfig& config, std::uint64_t seed);

struct TrialResult {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<double> trajectory;  // best-so-far, one entry per epoch run
  std::vector<double> inertia;     // PSO inertia weight per epoch
  std::string best_rule;           // RuleTable::to_hex()
  double train_fitness = 0.0;      // best fitness on its own epoch batch
  double final_fitness = 0.0;      // re-evaluated on a held-out batch
  std::string compressor;
  bool complete = true;
  std::string error;               // non-empty when the trial failed
  double wall_clock_seconds = 0.0;

  bool failed() const { return !error.empty(); }
};

// Everything except wall-clock time.
nlohmann::json to_json(const TrialResult& trial);
TrialResult trial_from_json(const nlohmann::json& doc);
std::string trajectory_csv(const TrialResult& trial);

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  // Over successful trials, final (held-out) fitness.
  double mean = 0.0;
  double stddev = 0.0;
  // Same, training-batch fitness.
  double train_mean = 0.0;
  double train_stddev = 0.0;
  bool complete = true;
};

// Mean and sample standard deviation (0 for fewer than two values).
struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

// Runs one trial. Objective / optimizer failures propagate as exceptions.
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index);

// Runs every trial (concurrently up to config.workers), aggregates, and
// writes the artifacts when output_dir is set. A failing trial is recorded
// with its error and the summary is marked incomplete.
ExperimentSummary run_experiment(const ExperimentConfig& config);

nlohmann::json summary_to_json(const ExperimentSummary& summary);
void write_artifacts(const ExperimentSummary& summary, const std::filesystem::path& dir);

}  // namespace caevo
