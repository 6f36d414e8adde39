#include "caevo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caevo/harness.hpp"
#include "caevo/render.hpp"
#include "json.hpp"

namespace caevo {

namespace fs = std::filesystem;

Configuration parse_ic_spec(std::string_view spec, std::size_t n, std::optional<std::size_t> at, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("lattice width must be positive");
  if (spec == "single-one") {
    const std::size_t pos = at.value_or(n / 2);
    if (pos >= n) throw std::invalid_argument("--at position outside the lattice");
    return Configuration::single_one(n, pos);
  }
  if (spec == "all-zeros") return Configuration::all_zeros(n);
  if (spec == "all-ones") return Configuration::all_ones(n);
  if (spec.starts_with("density:")) {
    const std::string value(spec.substr(8));
    char* end = nullptr;
    const double rho = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || !(rho >= 0.0 && rho <= 1.0)) {
      throw std::invalid_argument("density IC needs rho in [0, 1], got '" + value + "'");
    }
    const auto ones = static_cast<std::size_t>(std::llround(rho * static_cast<double>(n)));
    Rng rng(seed);
    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    Configuration ic(n);
    for (std::size_t i = 0; i < ones; ++i) {
      std::swap(slots[i], slots[i + rng.below(n - i)]);
      ic.set(slots[i], true);
    }
    return ic;
  }
  if (spec.starts_with("hex:")) return Configuration::from_hex(n, spec.substr(4));
  throw std::invalid_argument("unknown IC spec '" + std::string(spec) +
                              "' (single-one, all-zeros, all-ones, density:<rho>, hex:<digits>)");
}

namespace {

// Thrown for bad flag values discovered after CLI11 parsing; maps to exit 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::size_t default_workers() {
  if (const char* env = std::getenv("CAEVO_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 1;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct EvolveArgs {
  std::string config_file;
  std::string task = "density";
  std::string algo = "ga";
  std::size_t epochs = 200;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::size_t n = 149;
  std::size_t t = 150;
  int radius = 3;
  std::size_t batch = 100;
  double timeout = 0.0;
  std::size_t workers = 0;
  std::string out;
};

struct SimArgs {
  std::string rule;
  std::size_t n = 149;
  std::size_t steps = 150;
  std::string ic = "single-one";
  std::optional<std::size_t> at;
  std::uint64_t seed = 0;
  std::string render;
  std::string format;
  std::size_t scale = 1;
};

struct ReportArgs {
  std::string dir;
};

SpacetimeHistory simulate_history(const SimArgs& a) {
  RuleTable rule = [&] {
    try {
      return RuleTable::parse(a.rule);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }();
  if (a.n < static_cast<std::size_t>(2 * rule.radius() + 1)) {
    throw UsageError("--n must be at least " + std::to_string(2 * rule.radius() + 1) + " for a radius-" +
                     std::to_string(rule.radius()) + " rule");
  }
  Configuration ic = [&] {
    try {
      return parse_ic_spec(a.ic, a.n, a.at, a.seed);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }();
  return evolve(ic, rule, a.steps);
}

std::string image_format(const SimArgs& a, const std::string& path) {
  std::string format = a.format;
  if (format.empty()) format = fs::path(path).extension() == ".png" ? "png" : "pbm";
  return format;
}

void write_image(const SpacetimeHistory& history, const SimArgs& a, const std::string& path) {
  const Bitmap image = rasterize(history, a.scale);
  const std::string format = image_format(a, path);
  write_binary_file(path, format == "png" ? encode_png(image) : encode_pbm(image));
}

int cmd_evolve(const EvolveArgs& a, const CLI::App& sub, std::ostream& out) {
  ExperimentConfig cfg;
  try {
    if (!a.config_file.empty()) cfg = load_experiment_config(a.config_file);
    if (a.config_file.empty() || sub.count("--task")) cfg.task = parse_task(a.task);
    if (a.config_file.empty() || sub.count("--algo")) cfg.algorithm = parse_algorithm(a.algo);
    if (a.config_file.empty() || sub.count("--epochs")) cfg.epochs = a.epochs;
    if (a.config_file.empty() || sub.count("--trials")) cfg.trials = a.trials;
    if (a.config_file.empty() || sub.count("--seed")) cfg.seed = a.seed;
    if (a.config_file.empty() || sub.count("--n")) cfg.width = a.n;
    if (a.config_file.empty() || sub.count("--t")) cfg.steps = a.t;
    if (a.config_file.empty() || sub.count("--radius")) cfg.radius = a.radius;
    if (a.config_file.empty() || sub.count("--batch")) cfg.batch = a.batch;
    if (a.config_file.empty() || sub.count("--timeout")) cfg.trial_timeout_seconds = a.timeout;
    cfg.output_dir = a.out;
    cfg.workers = a.workers > 0 ? a.workers : default_workers();
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }

  const ExperimentSummary summary = run_experiment(cfg);
  std::size_t ok = 0;
  for (const auto& t : summary.trials) ok += (!t.failed() && t.complete) ? 1 : 0;
  out << "method  task     mean      stddev    train_mean  trials\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-8s %-9s %-9s %-11s %zu/%zu\n", std::string(algorithm_name(cfg.algorithm)).c_str(),
                std::string(task_name(cfg.task)).c_str(), fixed(summary.mean, 6).c_str(),
                fixed(summary.stddev, 6).c_str(), fixed(summary.train_mean, 6).c_str(), ok, cfg.trials);
  out << line;
  for (const auto& t : summary.trials) {
    if (t.failed()) out << "trial " << t.trial_index << " failed: " << t.error << "\n";
  }
  return summary.complete ? kExitOk : kExitFailure;
}

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  const SpacetimeHistory history = simulate_history(a);
  out << history_text(history);
  if (!a.render.empty()) write_image(history, a, a.render);
  return kExitOk;
}

int cmd_render(const SimArgs& a, const std::string& path) {
  write_image(simulate_history(a), a, path);
  return kExitOk;
}

// Reads one experiment directory, writes <dir>/curves.csv, returns the
// summary line. Problems are appended to `problems`.
std::optional<std::string> report_experiment(const fs::path& dir, std::vector<std::string>& problems) {
  nlohmann::json summary;
  try {
    std::ifstream in(dir / "summary.json");
    summary = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    problems.push_back((dir / "summary.json").string() + ": " + e.what());
    return std::nullopt;
  }

  std::string csv = "epoch,trial,best_fitness\n";
  bool ok = true;
  try {
    for (const auto& entry : summary.at("trials")) {
      const auto trial = entry.at("trial").get<std::size_t>();
      const fs::path file = dir / entry.at("csv").get<std::string>();
      std::ifstream in(file);
      std::string header;
      if (!in || !std::getline(in, header) || header != "epoch,best_fitness") {
        problems.push_back(file.string() + ": missing or bad header");
        ok = false;
        continue;
      }
      std::string line;
      std::size_t expected_epoch = 1;
      while (std::getline(in, line)) {
        const auto comma = line.find(',');
        std::size_t epoch = 0;
        double fitness = 0.0;
        try {
          if (comma == std::string::npos) throw std::invalid_argument("no comma");
          std::size_t used = 0;
          epoch = std::stoul(line.substr(0, comma), &used);
          fitness = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
          problems.push_back(file.string() + ": malformed row '" + line + "'");
          ok = false;
          break;
        }
        if (epoch != expected_epoch++) {
          problems.push_back(file.string() + ": epochs out of sequence");
          ok = false;
          break;
        }
        (void)fitness;
        csv += std::to_string(epoch) + "," + std::to_string(trial) + "," + line.substr(comma + 1) + "\n";
      }
    }
  } catch (const std::exception& e) {
    problems.push_back((dir / "summary.json").string() + ": " + e.what());
    return std::nullopt;
  }
  if (!ok) return std::nullopt;

  write_binary_file(dir / "curves.csv", csv);
  const auto& config = summary.at("config");
  char line[200];
  std::snprintf(line, sizeof line, "%s %s %s ±%s  (%s)", config.at("algorithm").get<std::string>().c_str(),
                config.at("task").get<std::string>().c_str(), fixed(summary.at("mean").get<double>(), 2).c_str(),
                fixed(summary.at("stddev").get<double>(), 2).c_str(), dir.string().c_str());
  return std::string(line);
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path root(a.dir);
  if (!fs::is_directory(root)) {
    err << "error: " << a.dir << " is not a directory\n";
    return kExitFailure;
  }
  std::vector<fs::path> experiments;
  if (fs::exists(root / "summary.json")) experiments.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.json" && entry.path().parent_path() != root) {
      experiments.push_back(entry.path().parent_path());
    }
  }
  std::sort(experiments.begin(), experiments.end());
  if (experiments.empty()) {
    err << "error: no experiment summaries found under " << a.dir << "\n";
    return kExitFailure;
  }
  std::vector<std::string> problems;
  std::vector<std::string> lines;
  for (const auto& dir : experiments) {
    if (auto line = report_experiment(dir, problems)) lines.push_back(*line);
  }
  for (const auto& l : lines) out << l << "\n";
  if (!problems.empty()) {
    err << "error: missing or corrupt artifacts:\n";
    for (const auto& p : problems) err << "  " << p << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--rule", a.rule, "rule: r<radius>:<hex>, or a decimal r=1 rule number")->required();
  cmd->add_option("--n", a.n, "lattice width")->capture_default_str();
  cmd->add_option("--steps,--t", a.steps, "number of steps T")->capture_default_str();
  cmd->add_option("--ic", a.ic, "single-one | all-zeros | all-ones | density:<rho> | hex:<digits>")->capture_default_str();
  cmd->add_option("--at", a.at, "position of the single live cell (default: centre)");
  cmd->add_option("--seed", a.seed, "seed for density:<rho> ICs")->capture_default_str();
  cmd->add_option("--format", a.format, "image format (default from extension)")->check(CLI::IsMember({"pbm", "png"}));
  cmd->add_option("--scale", a.scale, "pixels per cell")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolve and inspect one-dimensional cellular automata rules"};
  app.name("caevo");
  app.require_subcommand(1);

  EvolveArgs evolve_args;
  auto* evolve_cmd = app.add_subcommand("evolve", "run a multi-trial search experiment");
  evolve_cmd->add_option("--config", evolve_args.config_file, "experiment config JSON; flags given override it");
  evolve_cmd->add_option("--task", evolve_args.task, "density | chaos")->check(CLI::IsMember({"density", "chaos"}))->capture_default_str();
  evolve_cmd->add_option("--algo", evolve_args.algo, "ga | bpso | bglpso")->check(CLI::IsMember({"ga", "bpso", "bglpso"}))->capture_default_str();
  evolve_cmd->add_option("--epochs", evolve_args.epochs)->capture_default_str();
  evolve_cmd->add_option("--trials", evolve_args.trials)->capture_default_str();
  evolve_cmd->add_option("--seed", evolve_args.seed)->capture_default_str();
  evolve_cmd->add_option("--n", evolve_args.n, "lattice width")->capture_default_str();
  evolve_cmd->add_option("--t", evolve_args.t, "steps per CA run")->capture_default_str();
  evolve_cmd->add_option("--radius", evolve_args.radius)->capture_default_str();
  evolve_cmd->add_option("--batch", evolve_args.batch, "ICs per fitness evaluation")->capture_default_str();
  evolve_cmd->add_option("--timeout", evolve_args.timeout, "per-trial wall-clock limit in seconds (0 = none)");
  evolve_cmd->add_option("--workers", evolve_args.workers, "threads (default $CAEVO_WORKERS or 1)");
  evolve_cmd->add_option("--out", evolve_args.out, "output directory")->required();

  SimArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "print a spacetime history as rows of 0/1");
  add_sim_options(simulate_cmd, sim_args);
  simulate_cmd->add_option("--render", sim_args.render, "also write an image to this path");

  SimArgs render_args;
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "write a spacetime diagram image");
  add_sim_options(render_cmd, render_args);
  render_cmd->add_option("--out", render_out, "image path")->required();

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "merge fitness curves and print a summary table");
  report_cmd->add_option("dir,--dir", report_args.dir, "experiment output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*evolve_cmd) return cmd_evolve(evolve_args, *evolve_cmd, out);
    if (*simulate_cmd) return cmd_simulate(sim_args, out);
    if (*render_cmd) return cmd_render(render_args, render_out);
    if (*report_cmd) return cmd_report(report_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace caevo
