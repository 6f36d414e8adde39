#pragma once

// Search algorithms over fixed-length bit strings (binary PSO, BGL-PSO, GA)
// plus a continuous PSO used as a sanity check of the swarm machinery.
// All of them maximise.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "caevo/ca.hpp"
#include "caevo/objective.hpp"
#include "caevo/rng.hpp"
#include "json.hpp"

namespace caevo {

enum class Algorithm { ga, bpso, bglpso };
enum class InertiaMode { iterate, redraw };
enum class Topology { ring, linear };

std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

// Raised when an objective returns a non-finite value or throws. `index` is
// the particle / chromosome slot, `position` the offending candidate.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::size_t index, std::vector<double> position, const std::string& what)
      : std::runtime_error(what), index_(index), position_(std::move(position)) {}
  std::size_t index() const { return index_; }
  const std::vector<double>& position() const { return position_; }

 private:
  std::size_t index_;
  std::vector<double> position_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct OptimizerConfig {
  std::size_t epochs = 200;
  std::size_t population = 100;  // swarm size S, or GA population P
  double c1 = 2.0;
  double c2 = 2.0;
  double w1 = 0.4;
  double w2 = 0.9;
  double vmax = 6.0;
  std::size_t neighborhood_delta = 5;
  Topology topology = Topology::ring;
  std::vector<double> mutation_pmf = {0.50, 0.25, 0.15, 0.07, 0.03};
  InertiaMode inertia_mode = InertiaMode::iterate;
  double elite_fraction = 0.2;
  std::size_t mutation_count = 2;
  std::uint64_t seed = 0;
  // Evaluation threads. Not part of the serialized form: results do not
  // depend on it.
  std::size_t workers = 1;
};

// Flat key/value form. from_json starts from `base` and rejects unknown keys.
nlohmann::json to_json(const OptimizerConfig& config);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& doc, OptimizerConfig base = {});

struct RunHooks {
  // Polled before every epoch; returning true ends the run early and the
  // result is marked incomplete.
  std::function<bool()> should_stop;
};

struct SearchResult {
  BitString best;
  double best_fitness = kNegInf;
  std::vector<double> trajectory;  // best-so-far fitness after each epoch
  std::vector<double> inertia;     // PSO only: w used in each epoch
  bool complete = true;
};

// ---------------------------------------------------------------------------
// Shared machinery

// Runs task(i) for i in [0, count) on up to `workers` threads. If any task
// throws, the exception from the lowest index is rethrown after all finish.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

// Evaluates every candidate; a throwing objective or a non-finite value
// becomes an EvaluationError carrying the candidate's index.
std::vector<double> evaluate_all(const BitObjective& objective, std::span<const BitString> candidates,
                                 std::size_t workers);

BitString random_bits(std::size_t length, Rng& rng);

// ---------------------------------------------------------------------------
// Chaotic inertia weight
//
//   z' = 4 z (1 - z)
//   w  = (w1 - w2) (max_iter - t) / max_iter + w2 z'

struct InertiaStep {
  double w;
  double z;
};

// Throws std::invalid_argument when max_iter == 0 or t > max_iter.
InertiaStep chaotic_inertia(std::size_t t, std::size_t max_iter, double z, double w1 = 0.4, double w2 = 0.9);

// Draws a logistic-map seed in (0, 1) away from its fixed and pre-fixed
// points {0.25, 0.5, 0.75}.
double draw_chaotic_seed(Rng& rng);

// ---------------------------------------------------------------------------
// Continuous PSO

struct ContinuousPsoConfig {
  std::size_t epochs = 1000;
  std::size_t swarm = 30;
  double c1 = 2.0;
  double c2 = 2.0;
  double w1 = 0.4;
  double w2 = 0.9;
  double lower = -5.0;
  double upper = 5.0;
  // Velocity clamp as a fraction of (upper - lower).
  double vmax_fraction = 0.2;
  InertiaMode inertia_mode = InertiaMode::iterate;
  std::uint64_t seed = 0;
  // Optional explicit starting positions, one per particle.
  std::vector<std::vector<double>> initial_positions;
};

struct ContinuousResult {
  std::vector<double> best;
  double best_fitness = kNegInf;
  std::vector<double> trajectory;
};

ContinuousResult continuous_pso(const RealObjective& objective, std::size_t dim, const ContinuousPsoConfig& config);

// ---------------------------------------------------------------------------
// Binary PSO and BGL-PSO
//
// Each particle carries two velocity tracks: v1 drives a 0 bit towards 1, v0
// drives a 1 bit towards 0. The track matching the current bit value is
// squashed to a flip probability.

struct Particle {
  std::size_t index = 0;
  BitString position;
  std::vector<double> v1;
  std::vector<double> v0;
  BitString pbest_position;
  double pbest_fitness = kNegInf;
  BitString plocal_position;  // BGL-PSO only
  double plocal_fitness = kNegInf;
};

struct SwarmState {
  std::vector<Particle> particles;
  BitString gbest_position;
  double gbest_fitness = kNegInf;
  std::size_t epoch = 0;
  double z = 0.0;
};

struct PsoCoefficients {
  double c1 = 2.0;
  double c2 = 2.0;
  double vmax = 6.0;
};

// One bit of the binary PSO update with explicit random draws:
//   d1 = +c1 r1 towards pbest_bit, d2 = +c2 r2 towards gbest_bit
//   v1 = w v1 + d1^1 + d2^1,  v0 = w v0 + d1^0 + d2^0, clamped to +-vmax.
void bpso_velocity_bit(double& v1, double& v0, std::uint8_t pbest_bit, std::uint8_t gbest_bit, double r1, double r2,
                       double w, const PsoCoefficients& k);

// BGL-PSO bit update: the social attraction is the mean of the global and
// the local-best terms, the latter weighted by c2 r3.
void bgl_velocity_bit(double& v1, double& v0, std::uint8_t pbest_bit, std::uint8_t gbest_bit,
                      std::uint8_t plocal_bit, double r1, double r2, double r3, double w, const PsoCoefficients& k);

// Whole-particle updates, drawing r1, r2 (and r3) per bit from `rng`.
void bpso_velocity_update(Particle& p, const BitString& gbest, double w, const PsoCoefficients& k, Rng& rng);
void bgl_velocity_update(Particle& p, const BitString& gbest, const BitString& plocal, double w,
                         const PsoCoefficients& k, Rng& rng);

// Standard increasing sigmoid 1 / (1 + e^-v).
double flip_probability(double velocity);

// Bit j flips with probability flip_probability(x_j == 0 ? v1_j : v0_j).
void bpso_position_update(Particle& p, Rng& rng);

// Swarm indices within distance delta of i: circular distance on the ring
// topology, plain |i - j| on the linear one. Sorted ascending, includes i.
// Throws std::invalid_argument when i >= swarm or (ring) 2 delta + 1 > swarm.
std::vector<std::size_t> neighborhood(std::size_t i, std::size_t delta, std::size_t swarm,
                                      Topology topology = Topology::ring);

// Draws a flip count k from `pmf` (over 0..pmf.size()-1) and flips k
// distinct uniformly chosen bits. Returns k. Throws std::invalid_argument
// when the pmf does not sum to 1 or its support exceeds the string length.
std::size_t mutate_bits(BitString& bits, std::span<const double> pmf, Rng& rng);
void validate_pmf(std::span<const double> pmf, std::size_t length);

SwarmState init_swarm(std::size_t length, const OptimizerConfig& config, std::span<Rng> streams);

SearchResult binary_pso(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                        const RunHooks& hooks = {});
SearchResult bgl_pso(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                     const RunHooks& hooks = {});

// ---------------------------------------------------------------------------
// Genetic algorithm

struct Chromosome {
  BitString genes;
  double fitness = std::numeric_limits<double>::quiet_NaN();
};

struct GAPopulation {
  std::vector<Chromosome> members;
  std::size_t generation = 0;
  double elite_fraction = 0.2;
  std::size_t mutation_count = 2;

  // Throws std::invalid_argument unless size * elite_fraction is a positive
  // whole number and size >= 5.
  std::size_t elite_count() const;
};

// Ranks `evaluated` by fitness (descending, ties to the lower index), keeps
// the elite unchanged at the front, and fills the rest with children: two
// parents drawn with replacement from the elite, single-point crossover at a
// cut uniform on {1..L-1} (head of the first parent, tail of the second),
// then exactly mutation_count distinct bits flipped. Children have NaN
// fitness; elites keep their stale fitness until re-evaluated.
GAPopulation ga_step(const GAPopulation& evaluated, Rng& rng);

// Random initial population, then per generation: begin_epoch, evaluate,
// track best-ever, breed.
SearchResult ga(BitObjective& objective, std::size_t length, const OptimizerConfig& config,
                const RunHooks& hooks = {});

// Dispatch on algorithm.
SearchResult run_optimizer(Algorithm algorithm, BitObjective& objective, std::size_t length,
                           const OptimizerConfig& config, const RunHooks& hooks = {});

}  // namespace caevo
