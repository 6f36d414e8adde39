#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "caevo/optimizers.hpp"

namespace caevo {

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::ga:
      return "ga";
    case Algorithm::bpso:
      return "bpso";
    case Algorithm::bglpso:
      return "bglpso";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "ga") return Algorithm::ga;
  if (name == "bpso") return Algorithm::bpso;
  if (name == "bglpso") return Algorithm::bglpso;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected ga, bpso or bglpso)");
}

// ---------------------------------------------------------------------------
// Configuration document

nlohmann::json to_json(const OptimizerConfig& c) {
  return {
      {"epochs", c.epochs},
      {"population", c.population},
      {"c1", c.c1},
      {"c2", c.c2},
      {"w1", c.w1},
      {"w2", c.w2},
      {"vmax", c.vmax},
      {"neighborhood_delta", c.neighborhood_delta},
      {"topology", c.topology == Topology::ring ? "ring" : "linear"},
      {"mutation_pmf", c.mutation_pmf},
      {"inertia_mode", c.inertia_mode == InertiaMode::iterate ? "iterate" : "redraw"},
      {"elite_fraction", c.elite_fraction},
      {"mutation_count", c.mutation_count},
      {"seed", c.seed},
  };
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& doc, OptimizerConfig c) {
  if (!doc.is_object()) throw std::invalid_argument("optimizer config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "epochs") {
      c.epochs = value.get<std::size_t>();
    } else if (key == "population") {
      c.population = value.get<std::size_t>();
    } else if (key == "c1") {
      c.c1 = value.get<double>();
    } else if (key == "c2") {
      c.c2 = value.get<double>();
    } else if (key == "w1") {
      c.w1 = value.get<double>();
    } else if (key == "w2") {
      c.w2 = value.get<double>();
    } else if (key == "vmax") {
      c.vmax = value.get<double>();
    } else if (key == "neighborhood_delta") {
      c.neighborhood_delta = value.get<std::size_t>();
    } else if (key == "topology") {
      const auto s = value.get<std::string>();
      if (s != "ring" && s != "linear") throw std::invalid_argument("topology must be ring or linear");
      c.topology = s == "ring" ? Topology::ring : Topology::linear;
    } else if (key == "mutation_pmf") {
      c.mutation_pmf = value.get<std::vector<double>>();
    } else if (key == "inertia_mode") {
      const auto s = value.get<std::string>();
      if (s != "iterate" && s != "redraw") throw std::invalid_argument("inertia_mode must be iterate or redraw");
      c.inertia_mode = s == "iterate" ? InertiaMode::iterate : InertiaMode::redraw;
    } else if (key == "elite_fraction") {
      c.elite_fraction = value.get<double>();
    } else if (key == "mutation_count") {
      c.mutation_count = value.get<std::size_t>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      throw std::invalid_argument("unknown optimizer config key: " + key);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Evaluation

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run_range(0, count);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t per = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(count, w * per);
      const std::size_t end = std::min(count, begin + per);
      threads.emplace_back(run_range, begin, end);
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::vector<double> as_reals(const BitString& bits) { return {bits.begin(), bits.end()}; }

}  // namespace

std::vector<double> evaluate_all(const BitObjective& objective, std::span<const BitString> candidates,
                                 std::size_t workers) {
  std::vector<double> fitness(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    double value;
    try {
      value = objective.evaluate(candidates[i]);
    } catch (const std::exception& e) {
      throw EvaluationError(i, as_reals(candidates[i]), "objective failed for candidate " + std::to_string(i) + ": " + e.what());
    }
    if (!std::isfinite(value)) {
      throw EvaluationError(i, as_reals(candidates[i]), "objective returned a non-finite value for candidate " + std::to_string(i));
    }
    fitness[i] = value;
  });
  return fitness;
}

BitString random_bits(std::size_t length, Rng& rng) {
  BitString bits(length);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

// ---------------------------------------------------------------------------
// Inertia

InertiaStep chaotic_inertia(std::size_t t, std::size_t max_iter, double z, double w1, double w2) {
  if (max_iter == 0) throw std::invalid_argument("chaotic inertia needs max_iter > 0");
  if (t > max_iter) throw std::invalid_argument("epoch past max_iter");
  const double next = 4.0 * z * (1.0 - z);
  const double progress = static_cast<double>(max_iter - t) / static_cast<double>(max_iter);
  return {(w1 - w2) * progress + w2 * next, next};
}

double draw_chaotic_seed(Rng& rng) {
  for (;;) {
    const double z = rng.uniform();
    if (z > 0.0 && z != 0.25 && z != 0.5 && z != 0.75) return z;
  }
}

// ---------------------------------------------------------------------------
// Neighbourhoods and mutation

std::vector<std::size_t> neighborhood(std::size_t i, std::size_t delta, std::size_t swarm, Topology topology) {
  if (i >= swarm) throw std::invalid_argument("particle index outside the swarm");
  std::vector<std::size_t> out;
  if (topology == Topology::ring) {
    if (2 * delta + 1 > swarm) {
      throw std::invalid_argument("neighbourhood tolerance " + std::to_string(delta) + " too large for swarm of " +
                                  std::to_string(swarm));
    }
    for (std::size_t j = 0; j < swarm; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      if (std::min(d, swarm - d) <= delta) out.push_back(j);
    }
  } else {
    const std::size_t lo = i >= delta ? i - delta : 0;
    const std::size_t hi = std::min(swarm - 1, i + delta);
    for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
  }
  return out;
}

void validate_pmf(std::span<const double> pmf, std::size_t length) {
  if (pmf.empty()) throw std::invalid_argument("mutation pmf is empty");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument("mutation pmf has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mutation pmf must sum to 1");
  if (pmf.size() - 1 > length) {
    throw std::invalid_argument("mutation pmf allows " + std::to_string(pmf.size() - 1) + " flips on a string of length " +
                                std::to_string(length));
  }
}

std::size_t mutate_bits(BitString& bits, std::span<const double> pmf, Rng& rng) {
  validate_pmf(pmf, bits.size());
  const double u = rng.uniform();
  std::size_t flips = pmf.size() - 1;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    cumulative += pmf[k];
    if (u < cumulative) {
      flips = k;
      break;
    }
  }
  // Trailing zero-probability entries must never be selected by round-off.
  while (flips > 0 && pmf[flips] == 0.0) --flips;
  if (flips == 0) return 0;

  std::vector<std::size_t> slots(bits.size());
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  for (std::size_t i = 0; i < flips; ++i) {
    const std::size_t j = i + rng.below(slots.size() - i);
    std::swap(slots[i], slots[j]);
    bits[slots[i]] ^= 1U;
  }
  return flips;
}

SearchResult run_optimizer(Algorithm algorithm, BitObjective& objective, std::size_t length,
                           const OptimizerConfig& config, const RunHooks& hooks) {
  switch (algorithm) {
    case Algorithm::ga:
      return ga(objective, length, config, hooks);
    case Algorithm::bpso:
      return binary_pso(objective, length, config, hooks);
    case Algorithm::bglpso:
      return bgl_pso(objective, length, config, hooks);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace caevo
