#include <algorithm>
#include <cmath>

#include "caevo/optimizers.hpp"

namespace caevo {

namespace {

// (d^1, d^0) pulling a bit towards `target`, with magnitude `pull`.
struct Pull {
  double one;
  double zero;
};

Pull pull_towards(std::uint8_t target, double pull) { return target ? Pull{pull, -pull} : Pull{-pull, pull}; }

double clamp_velocity(double v, double vmax) { return std::clamp(v, -vmax, vmax); }

// Advances the chaotic state by one epoch and returns the inertia weight.
double next_inertia(InertiaMode mode, std::size_t epoch, std::size_t max_iter, double w1, double w2, double& z,
                    Rng& inertia_rng) {
  if (mode == InertiaMode::redraw) z = draw_chaotic_seed(inertia_rng);
  const auto step = chaotic_inertia(epoch, max_iter, z, w1, w2);
  z = step.z;
  return step.w;
}

bool stop_requested(const RunHooks& hooks) { return hooks.should_stop && hooks.should_stop(); }

}  // namespace

// ---------------------------------------------------------------------------
// Continuous PSO

ContinuousResult continuous_pso(const RealObjective& objective, std::size_t dim, const ContinuousPsoConfig& config) {
  if (dim == 0) throw std::invalid_argument("continuous PSO needs dim >= 1");
  if (config.swarm < 2) throw std::invalid_argument("continuous PSO needs a swarm of at least 2");
  if (config.epochs == 0) throw std::invalid_argument("continuous PSO needs epochs >= 1");
  if (!(config.upper > config.lower)) throw std::invalid_argument("continuous PSO needs lower < upper");
  if (!config.initial_positions.empty() && config.initial_positions.size() != config.swarm) {
    throw std::invalid_argument("initial_positions must give one position per particle");
  }

  const double vmax = config.vmax_fraction * (config.upper - config.lower);
  std::vector<Rng> streams;
  streams.reserve(config.swarm);
  for (std::size_t i = 0; i < config.swarm; ++i) streams.emplace_back(derive_seed(config.seed, i));
  Rng inertia_rng(derive_seed(config.seed, "inertia"));
  double z = draw_chaotic_seed(inertia_rng);

  std::vector<std::vector<double>> x(config.swarm, std::vector<double>(dim));
  std::vector<std::vector<double>> v(config.swarm, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < config.swarm; ++i) {
    if (!config.initial_positions.empty()) {
      if (config.initial_positions[i].size() != dim) throw std::invalid_argument("initial position has wrong dimension");
      x[i] = config.initial_positions[i];
    } else {
      for (auto& xi : x[i]) xi = config.lower + (config.upper - config.lower) * streams[i].uniform();
    }
  }
  std::vector<std::vector<double>> pbest = x;
  std::vector<double> pbest_fitness(config.swarm, kNegInf);

  ContinuousResult result;
  result.trajectory.reserve(config.epochs);
  for (std::size_t t = 0; t < config.epochs; ++t) {
    for (std::size_t i = 0; i < config.swarm; ++i) {
      const double f = objective(x[i]);
      if (!std::isfinite(f)) throw EvaluationError(i, x[i], "objective returned a non-finite value for particle " + std::to_string(i));
      if (f > pbest_fitness[i]) {
        pbest_fitness[i] = f;
        pbest[i] = x[i];
      }
      if (f > result.best_fitness) {
        result.best_fitness = f;
        result.best = x[i];
      }
    }
    result.trajectory.push_back(result.best_fitness);

    const double w = next_inertia(config.inertia_mode, t, config.epochs, config.w1, config.w2, z, inertia_rng);
    for (std::size_t i = 0; i < config.swarm; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double phi1 = streams[i].uniform();
        const double phi2 = streams[i].uniform();
        double vel = w * v[i][d] + config.c1 * phi1 * (pbest[i][d] - x[i][d]) + config.c2 * phi2 * (result.best[d] - x[i][d]);
        vel = clamp_velocity(vel, vmax);
        v[i][d] = vel;
        x[i][d] += vel;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Binary update rules

void bpso_velocity_bit(double& v1, double& v0, std::uint8_t pbest_bit, std::uint8_t gbest_bit, double r1, double r2,
                       double w, const PsoCoefficients& k) {
  const Pull cognitive = pull_towards(pbest_bit, k.c1 * r1);
  const Pull social = pull_towards(gbest_bit, k.c2 * r2);
  v1 = clamp_velocity(w * v1 + cognitive.one + social.one, k.vmax);
  v0 = clamp_velocity(w * v0 + cognitive.zero + social.zero, k.vmax);
}

void bgl_velocity_bit(double& v1, double& v0, std::uint8_t pbest_bit, std::uint8_t gbest_bit,
                      std::uint8_t plocal_bit, double r1, double r2, double r3, double w, const PsoCoefficients& k) {
  const Pull cognitive = pull_towards(pbest_bit, k.c1 * r1);
  const Pull global = pull_towards(gbest_bit, k.c2 * r2);
  const Pull local = pull_towards(plocal_bit, k.c2 * r3);
  v1 = clamp_velocity(w * v1 + cognitive.one + (global.one + local.one) / 2.0, k.vmax);
  v0 = clamp_velocity(w * v0 + cognitive.zero + (global.zero + local.zero) / 2.0, k.vmax);
}

void bpso_velocity_update(Particle& p, const BitString& gbest, double w, const PsoCoefficients& k, Rng& rng) {
  const std::size_t n = p.position.size();
  if (gbest.size() != n || p.pbest_position.size() != n) throw std::invalid_argument("velocity update: length mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    bpso_velocity_bit(p.v1[j], p.v0[j], p.pbest_position[j], gbest[j], r1, r2, w, k);
  }
}

void bgl_velocity_update(Particle& p, const BitString& gbest, const BitString& plocal, double w,
                         const PsoCoefficients& k, Rng& rng) {
  const std::size_t n = p.position.size();
  if (gbest.size() != n || plocal.size() != n || p.pbest_position.size() != n) {
    throw std::invalid_argument("velocity update: length mismatch");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    const double r3 = rng.uniform();
    bgl_velocity_bit(p.v1[j], p.v0[j], p.pbest_position[j], gbest[j], plocal[j], r1, r2, r3, w, k);
  }
}

double flip_probability(double velocity) { return 1.0 / (1.0 + std::exp(-velocity)); }

void bpso_position_update(Particle& p, Rng& rng) {
  for (std::size_t j = 0; j < p.position.size(); ++j) {
    const double change = p.position[j] ? p.v0[j] : p.v1[j];
    if (rng.uniform() < flip_probability(change)) p.position[j] ^= 1U;
  }
}

// ---------------------------------------------------------------------------
// Swarm driver

SwarmState init_swarm(std::size_t length, const OptimizerConfig& config, std::span<Rng> streams) {
  SwarmState swarm;
  swarm.particles.resize(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    Particle& p = swarm.particles[i];
    p.index = i;
    p.position = random_bits(length, streams[i]);
    p.v1.resize(length);
    p.v0.resize(length);
    for (std::size_t j = 0; j < length; ++j) {
      p.v1[j] = streams[i].uniform();
      p.v0[j] = streams[i].uniform();
    }
    p.pbest_position = p.position;
    p.plocal_position = p.position;
  }
  return swarm;
}

namespace {

SearchResult run_swarm(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                       const RunHooks& hooks, bool global_local) {
  if (length == 0) throw std::invalid_argument("bit strings must have length >= 1");
  if (config.population < 2) throw std::invalid_argument("swarm size must be at least 2");
  if (config.epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  if (global_local) {
    validate_pmf(config.mutation_pmf, length);
    (void)neighborhood(0, config.neighborhood_delta, config.population, config.topology);
  }

  const PsoCoefficients coefficients{config.c1, config.c2, config.vmax};
  const std::size_t swarm_size = config.population;

  std::vector<Rng> streams;
  streams.reserve(swarm_size);
  for (std::size_t i = 0; i < swarm_size; ++i) streams.emplace_back(derive_seed(config.seed, i));
  Rng inertia_rng(derive_seed(config.seed, "inertia"));

  SwarmState swarm = init_swarm(length, config, streams);
  swarm.z = draw_chaotic_seed(inertia_rng);

  std::vector<std::vector<std::size_t>> neighbours;
  if (global_local) {
    for (std::size_t i = 0; i < swarm_size; ++i) {
      neighbours.push_back(neighborhood(i, config.neighborhood_delta, swarm_size, config.topology));
    }
  }

  SearchResult result;
  result.trajectory.reserve(config.epochs);
  std::vector<BitString> positions(swarm_size);
  for (std::size_t t = 0; t < config.epochs; ++t) {
    if (stop_requested(hooks)) {
      result.complete = false;
      break;
    }
    swarm.epoch = t;
    objective.begin_epoch(t);
    for (std::size_t i = 0; i < swarm_size; ++i) positions[i] = swarm.particles[i].position;
    const std::vector<double> fitness = evaluate_all(objective, positions, config.workers);

    for (std::size_t i = 0; i < swarm_size; ++i) {
      Particle& p = swarm.particles[i];
      if (fitness[i] > p.pbest_fitness) {
        p.pbest_fitness = fitness[i];
        p.pbest_position = positions[i];
      }
      if (fitness[i] > swarm.gbest_fitness) {
        swarm.gbest_fitness = fitness[i];
        swarm.gbest_position = positions[i];
      }
    }
    if (global_local) {
      for (std::size_t i = 0; i < swarm_size; ++i) {
        std::size_t best = neighbours[i].front();
        for (std::size_t j : neighbours[i]) {
          if (fitness[j] > fitness[best]) best = j;
        }
        Particle& p = swarm.particles[i];
        if (fitness[best] > p.plocal_fitness) {
          p.plocal_fitness = fitness[best];
          p.plocal_position = positions[best];
        }
      }
    }
    result.trajectory.push_back(swarm.gbest_fitness);

    const double w =
        next_inertia(config.inertia_mode, t, config.epochs, config.w1, config.w2, swarm.z, inertia_rng);
    result.inertia.push_back(w);
    for (std::size_t i = 0; i < swarm_size; ++i) {
      Particle& p = swarm.particles[i];
      if (global_local) {
        bgl_velocity_update(p, swarm.gbest_position, p.plocal_position, w, coefficients, streams[i]);
      } else {
        bpso_velocity_update(p, swarm.gbest_position, w, coefficients, streams[i]);
      }
      bpso_position_update(p, streams[i]);
      if (global_local) mutate_bits(p.position, config.mutation_pmf, streams[i]);
    }
  }
  result.best = swarm.gbest_position;
  result.best_fitness = swarm.gbest_fitness;
  return result;
}

}  // namespace

SearchResult binary_pso(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                        const RunHooks& hooks) {
  return run_swarm(objective, length, config, hooks, false);
}

SearchResult bgl_pso(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                     const RunHooks& hooks) {
  return run_swarm(objective, length, config, hooks, true);
}

}  // namespace caevo
