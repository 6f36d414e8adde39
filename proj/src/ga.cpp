#include <algorithm>
#include <cmath>
#include <numeric>

#include "caevo/optimizers.hpp"

namespace caevo {

std::size_t GAPopulation::elite_count() const {
  if (members.size() < 5) throw std::invalid_argument("GA population must have at least 5 members");
  const double exact = static_cast<double>(members.size()) * elite_fraction;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9) {
    throw std::invalid_argument("population size " + std::to_string(members.size()) +
                                " is not compatible with elite fraction " + std::to_string(elite_fraction));
  }
  return static_cast<std::size_t>(rounded);
}

GAPopulation ga_step(const GAPopulation& evaluated, Rng& rng) {
  const std::size_t elites = evaluated.elite_count();
  const std::size_t size = evaluated.members.size();
  const std::size_t length = evaluated.members.front().genes.size();
  if (length < 2) throw std::invalid_argument("single-point crossover needs strings of length >= 2");
  if (evaluated.mutation_count > length) throw std::invalid_argument("mutation count exceeds string length");

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return evaluated.members[a].fitness > evaluated.members[b].fitness;
  });

  GAPopulation next;
  next.generation = evaluated.generation + 1;
  next.elite_fraction = evaluated.elite_fraction;
  next.mutation_count = evaluated.mutation_count;
  next.members.reserve(size);
  for (std::size_t e = 0; e < elites; ++e) next.members.push_back(evaluated.members[order[e]]);

  std::vector<std::size_t> slots(length);
  while (next.members.size() < size) {
    const BitString& head = next.members[rng.below(elites)].genes;
    const BitString& tail = next.members[rng.below(elites)].genes;
    const std::size_t cut = rng.between(1, length - 1);

    Chromosome child;
    child.genes.reserve(length);
    child.genes.insert(child.genes.end(), head.begin(), head.begin() + static_cast<std::ptrdiff_t>(cut));
    child.genes.insert(child.genes.end(), tail.begin() + static_cast<std::ptrdiff_t>(cut), tail.end());

    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t m = 0; m < evaluated.mutation_count; ++m) {
      const std::size_t j = m + rng.below(length - m);
      std::swap(slots[m], slots[j]);
      child.genes[slots[m]] ^= 1U;
    }
    next.members.push_back(std::move(child));
  }
  return next;
}

SearchResult ga(BitObjective& objective, std::size_t length, const OptimizerConfig& config, const RunHooks& hooks) {
  if (config.epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  Rng init_rng(derive_seed(config.seed, "init"));
  Rng breed_rng(derive_seed(config.seed, "breed"));

  GAPopulation population;
  population.elite_fraction = config.elite_fraction;
  population.mutation_count = config.mutation_count;
  population.members.resize(config.population);
  for (auto& member : population.members) member.genes = random_bits(length, init_rng);
  (void)population.elite_count();
  if (length < 2) throw std::invalid_argument("single-point crossover needs strings of length >= 2");
  if (config.mutation_count > length) throw std::invalid_argument("mutation count exceeds string length");

  SearchResult result;
  result.trajectory.reserve(config.epochs);
  std::vector<BitString> genomes(config.population);
  for (std::size_t generation = 0; generation < config.epochs; ++generation) {
    if (hooks.should_stop && hooks.should_stop()) {
      result.complete = false;
      break;
    }
    objective.begin_epoch(generation);
    for (std::size_t i = 0; i < config.population; ++i) genomes[i] = population.members[i].genes;
    const std::vector<double> fitness = evaluate_all(objective, genomes, config.workers);
    for (std::size_t i = 0; i < config.population; ++i) {
      population.members[i].fitness = fitness[i];
      if (fitness[i] > result.best_fitness) {
        result.best_fitness = fitness[i];
        result.best = genomes[i];
      }
    }
    result.trajectory.push_back(result.best_fitness);
    if (generation + 1 < config.epochs) population = ga_step(population, breed_rng);
  }
  return result;
}

}  // namespace caevo
