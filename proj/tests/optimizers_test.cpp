#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "caevo/objectives.hpp"
#include "caevo/optimizers.hpp"

using namespace caevo;

namespace {

double onemax(const BitString& bits) { return static_cast<double>(std::count(bits.begin(), bits.end(), 1)); }

std::size_t hamming(const BitString& a, const BitString& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

bool nondecreasing(const std::vector<double>& xs) { return std::is_sorted(xs.begin(), xs.end()); }

OptimizerConfig small_config(std::uint64_t seed, std::size_t epochs, std::size_t population) {
  OptimizerConfig c;
  c.seed = seed;
  c.epochs = epochs;
  c.population = population;
  return c;
}

// Onemax whose optimum moves every epoch; used to exercise resampling.
class DriftingObjective final : public BitObjective {
 public:
  void begin_epoch(std::uint64_t epoch) override { shift_ = epoch % 3; }
  double evaluate(const BitString& bits) const override { return onemax(bits) + static_cast<double>(shift_) * bits[0]; }

 private:
  std::uint64_t shift_ = 0;
};

}  // namespace

TEST(Algorithm, Names) {
  for (auto a : {Algorithm::ga, Algorithm::bpso, Algorithm::bglpso}) EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_THROW(parse_algorithm("pso"), std::invalid_argument);
}

TEST(ChaoticInertia, Arithmetic) {
  // z = 0.5 is excluded as a seed, but the formula itself is checked at the
  // point where z' = 0.5: 4 z (1 - z) = 0.5 for z = (2 - sqrt 2) / 4.
  const double z_half = (2.0 - std::sqrt(2.0)) / 4.0;
  InertiaStep end = chaotic_inertia(100, 100, z_half);
  EXPECT_NEAR(end.z, 0.5, 1e-12);
  EXPECT_NEAR(end.w, 0.45, 1e-12);
  InertiaStep start = chaotic_inertia(0, 100, z_half);
  EXPECT_NEAR(start.w, -0.05, 1e-12);
  EXPECT_NEAR(chaotic_inertia(10, 100, 0.3).z, 0.84, 1e-12);
  EXPECT_THROW(chaotic_inertia(0, 0, 0.3), std::invalid_argument);
  EXPECT_THROW(chaotic_inertia(101, 100, 0.3), std::invalid_argument);
}

TEST(ChaoticInertia, SeedAvoidsFixedPoints) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double z = draw_chaotic_seed(rng);
    EXPECT_GT(z, 0.0);
    EXPECT_LT(z, 1.0);
  }
}

TEST(Sigmoid, Values) {
  EXPECT_DOUBLE_EQ(flip_probability(0.0), 0.5);
  EXPECT_NEAR(flip_probability(6.0), 0.997527, 1e-6);
  EXPECT_NEAR(flip_probability(-6.0), 0.002473, 1e-6);
  EXPECT_GT(flip_probability(1.0), flip_probability(0.5));
}

TEST(BpsoVelocity, CaseAlgebra) {
  const PsoCoefficients k{};
  double v1 = 0.0, v0 = 0.0;
  bpso_velocity_bit(v1, v0, 1, 1, 0.3, 0.7, 1.0, k);
  EXPECT_DOUBLE_EQ(v1, 2 * 0.3 + 2 * 0.7);
  EXPECT_DOUBLE_EQ(v0, -(2 * 0.3 + 2 * 0.7));

  v1 = v0 = 0.0;
  bpso_velocity_bit(v1, v0, 0, 0, 0.3, 0.7, 1.0, k);
  EXPECT_DOUBLE_EQ(v1, -(2 * 0.3 + 2 * 0.7));
  EXPECT_DOUBLE_EQ(v0, 2 * 0.3 + 2 * 0.7);

  v1 = 5.0, v0 = -5.0;
  bpso_velocity_bit(v1, v0, 1, 0, 0.5, 0.5, 0.0, k);
  EXPECT_DOUBLE_EQ(v1, 0.0);
  EXPECT_DOUBLE_EQ(v0, 0.0);

  v1 = 0.5, v0 = 0.25;
  bpso_velocity_bit(v1, v0, 1, 0, 0.1, 0.4, 0.5, k);
  EXPECT_DOUBLE_EQ(v1, 0.25 + 0.2 - 0.8);
  EXPECT_DOUBLE_EQ(v0, 0.125 - 0.2 + 0.8);
}

TEST(BpsoVelocity, Clamped) {
  const PsoCoefficients k{};
  double v1 = 5.5, v0 = -5.5;
  bpso_velocity_bit(v1, v0, 1, 1, 1.0, 1.0, 1.0, k);
  EXPECT_DOUBLE_EQ(v1, 6.0);
  EXPECT_DOUBLE_EQ(v0, -6.0);

  Rng rng(3);
  Particle p;
  p.position = p.pbest_position = BitString(64, 1);
  p.v1.assign(64, 6.0);
  p.v0.assign(64, -6.0);
  for (int i = 0; i < 50; ++i) {
    bpso_velocity_update(p, BitString(64, 0), 0.9, k, rng);
    for (std::size_t j = 0; j < 64; ++j) {
      ASSERT_LE(std::abs(p.v1[j]), 6.0);
      ASSERT_LE(std::abs(p.v0[j]), 6.0);
    }
  }
}

TEST(BglVelocity, SocialAverage) {
  const PsoCoefficients k{};
  double v1 = 0.0, v0 = 0.0;
  bgl_velocity_bit(v1, v0, 1, 1, 1, 0.0, 0.4, 0.8, 0.0, k);
  EXPECT_DOUBLE_EQ(v1, (2 * 0.4 + 2 * 0.8) / 2);

  // gbest and plocal disagree with equal draws: social terms cancel.
  v1 = 1.5, v0 = -1.0;
  bgl_velocity_bit(v1, v0, 0, 1, 0, 0.25, 0.6, 0.6, 0.5, k);
  EXPECT_DOUBLE_EQ(v1, 0.75 - 0.5);
  EXPECT_DOUBLE_EQ(v0, -0.5 + 0.5);

  // plocal == gbest and r3 == r2 reduces to the binary PSO update.
  for (std::uint8_t pb : {0, 1}) {
    for (std::uint8_t gb : {0, 1}) {
      double a1 = 0.3, a0 = -0.2, b1 = 0.3, b0 = -0.2;
      bgl_velocity_bit(a1, a0, pb, gb, gb, 0.1, 0.7, 0.7, 0.6, k);
      bpso_velocity_bit(b1, b0, pb, gb, 0.1, 0.7, 0.6, k);
      EXPECT_DOUBLE_EQ(a1, b1);
      EXPECT_DOUBLE_EQ(a0, b0);
    }
  }
}

TEST(BpsoPosition, UsesTrackOfCurrentBit) {
  Rng rng(8);
  Particle p;
  p.position = BitString(2000, 0);
  p.position.resize(4000, 1);
  // Zeros are pushed hard towards 1, ones are held firmly.
  p.v1.assign(4000, 6.0);
  p.v0.assign(4000, -6.0);
  bpso_position_update(p, rng);
  const auto zeros_flipped = std::count(p.position.begin(), p.position.begin() + 2000, 1);
  const auto ones_flipped = std::count(p.position.begin() + 2000, p.position.end(), 0);
  EXPECT_NEAR(zeros_flipped / 2000.0, 0.9975, 0.005);
  EXPECT_NEAR(ones_flipped / 2000.0, 0.0025, 0.005);
}

TEST(Neighborhood, Ring) {
  std::vector<std::size_t> expected = {0, 1, 2, 3, 4, 5, 95, 96, 97, 98, 99};
  EXPECT_EQ(neighborhood(0, 5, 100), expected);
  EXPECT_EQ(neighborhood(50, 0, 100), std::vector<std::size_t>{50});
  EXPECT_THROW(neighborhood(0, 50, 100), std::invalid_argument);
  EXPECT_THROW(neighborhood(100, 5, 100), std::invalid_argument);

  std::vector<int> memberships(100, 0);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j : neighborhood(i, 5, 100)) ++memberships[j];
  }
  for (int m : memberships) EXPECT_EQ(m, 11);
}

TEST(Neighborhood, Linear) {
  EXPECT_EQ(neighborhood(0, 2, 10, Topology::linear), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(neighborhood(3, 100, 5, Topology::linear).size(), 5U);
}

TEST(Mutation, Pmf) {
  const std::vector<double> pmf = {0.50, 0.25, 0.15, 0.07, 0.03};
  double expected = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) expected += static_cast<double>(k) * pmf[k];
  EXPECT_NEAR(expected, 0.88, 1e-12);

  Rng rng(12);
  double total = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    BitString bits(32, 0);
    const std::size_t k = mutate_bits(bits, pmf, rng);
    ASSERT_EQ(static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)), k);
    total += static_cast<double>(k);
  }
  EXPECT_NEAR(total / draws, 0.88, 0.01);
}

TEST(Mutation, DegenerateCases) {
  Rng rng(2);
  BitString bits = {1, 0, 1, 1, 0};
  const std::vector<double> none = {1.0};
  EXPECT_EQ(mutate_bits(bits, none, rng), 0U);
  EXPECT_EQ(bits, (BitString{1, 0, 1, 1, 0}));

  const std::vector<double> all = {0, 0, 0, 0, 0, 1};
  EXPECT_EQ(mutate_bits(bits, all, rng), 5U);
  EXPECT_EQ(bits, (BitString{0, 1, 0, 0, 1}));

  const std::vector<double> too_long = {0, 0, 0, 0, 0, 0, 1};
  EXPECT_THROW(mutate_bits(bits, too_long, rng), std::invalid_argument);
  const std::vector<double> unnormalised = {0.5, 0.4};
  EXPECT_THROW(mutate_bits(bits, unnormalised, rng), std::invalid_argument);
}

TEST(GaStep, IdenticalParentsDifferInTwoBits) {
  Rng rng(5);
  GAPopulation pop;
  BitString genes(40);
  for (std::size_t i = 0; i < genes.size(); ++i) genes[i] = static_cast<std::uint8_t>(i % 3 == 0);
  pop.members.assign(20, Chromosome{genes, 1.0});
  GAPopulation next = ga_step(pop, rng);
  ASSERT_EQ(next.members.size(), 20U);
  EXPECT_EQ(next.generation, 1U);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(next.members[i].genes, genes);
  for (std::size_t i = 4; i < 20; ++i) {
    EXPECT_EQ(hamming(next.members[i].genes, genes), 2U);
    EXPECT_TRUE(std::isnan(next.members[i].fitness));
  }
}

TEST(GaStep, EliteIsTopFifthWithStableTies) {
  Rng rng(6);
  GAPopulation pop;
  for (int i = 0; i < 10; ++i) {
    BitString g(8, 0);
    g[static_cast<std::size_t>(i % 8)] = 1;
    g[0] = static_cast<std::uint8_t>(i >= 8);
    pop.members.push_back({g, i == 3 || i == 7 || i == 9 ? 5.0 : static_cast<double>(i % 3)});
  }
  GAPopulation next = ga_step(pop, rng);
  ASSERT_EQ(pop.elite_count(), 2U);
  EXPECT_EQ(next.members[0].genes, pop.members[3].genes);
  EXPECT_EQ(next.members[1].genes, pop.members[7].genes);
}

TEST(GaStep, ChildrenComeFromEliteCrossover) {
  // Elite parents all-zero and all-one: any child is 0^c 1^(L-c) or 1^c 0^(L-c)
  // or uniform, then two flips.
  Rng rng(9);
  GAPopulation pop;
  pop.members.push_back({BitString(30, 0), 2.0});
  pop.members.push_back({BitString(30, 1), 3.0});
  for (int i = 0; i < 8; ++i) pop.members.push_back({BitString(30, static_cast<std::uint8_t>(i % 2)), 0.0});
  for (int rep = 0; rep < 50; ++rep) {
    GAPopulation next = ga_step(pop, rng);
    for (std::size_t i = 2; i < 10; ++i) {
      const BitString& c = next.members[i].genes;
      std::size_t best = 30;
      for (std::size_t cut = 1; cut < 30; ++cut) {
        BitString a(30, 0), b(30, 1);
        std::fill(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut), 1);
        std::fill(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut), 0);
        best = std::min({best, hamming(c, a), hamming(c, b), hamming(c, BitString(30, 0)), hamming(c, BitString(30, 1))});
      }
      ASSERT_LE(best, 2U);
    }
  }
}

TEST(GaStep, Validation) {
  Rng rng(1);
  GAPopulation pop;
  pop.members.assign(4, Chromosome{BitString(8, 0), 0.0});
  EXPECT_THROW(ga_step(pop, rng), std::invalid_argument);
  pop.members.assign(7, Chromosome{BitString(8, 0), 0.0});
  EXPECT_THROW(ga_step(pop, rng), std::invalid_argument);
}

TEST(Ga, ClimbsOnemax) {
  // Every child carries exactly two fresh flips, so the final bit is slow to
  // fix; within one bit of the optimum is the reliable outcome.
  FunctionObjective obj(onemax);
  for (std::uint64_t s = 0; s < 5; ++s) {
    SearchResult r = ga(obj, 128, small_config(s, 200, 100));
    EXPECT_EQ(r.trajectory.size(), 200U);
    EXPECT_TRUE(nondecreasing(r.trajectory));
    EXPECT_GE(r.best_fitness, 127.0);
  }
  EXPECT_EQ(ga(obj, 16, small_config(3, 100, 20)).best_fitness, 16.0);
}

TEST(Ga, ElitismIsMonotoneOnFixedObjective) {
  FunctionObjective obj([](const BitString& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) v += b[i] * std::sin(static_cast<double>(i));
    return v;
  });
  SearchResult r = ga(obj, 50, small_config(4, 40, 20));
  EXPECT_TRUE(nondecreasing(r.trajectory));
}

TEST(BinaryPso, SolvesOnemax) {
  FunctionObjective obj(onemax);
  int solved = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    SearchResult r = binary_pso(obj, 32, small_config(s, 100, 20));
    EXPECT_EQ(r.inertia.size(), 100U);
    solved += r.best_fitness == 32.0;
  }
  EXPECT_GE(solved, 4);
}

TEST(BinaryPso, SingleBit) {
  FunctionObjective obj([](const BitString& b) { return static_cast<double>(b[0]); });
  SearchResult r = binary_pso(obj, 1, small_config(1, 5, 4));
  EXPECT_EQ(r.best, BitString{1});
}

TEST(BglPso, SolvesOnemax) {
  FunctionObjective obj(onemax);
  int solved = 0;
  for (std::uint64_t s = 0; s < 5; ++s) solved += bgl_pso(obj, 32, small_config(s, 100, 20)).best_fitness == 32.0;
  EXPECT_GE(solved, 4);
}

TEST(BglPso, WholeSwarmWithoutMutationTracksBinaryPso) {
  FunctionObjective obj(onemax);
  double bgl = 0.0, bpso = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    OptimizerConfig c = small_config(s, 15, 20);
    bpso += binary_pso(obj, 64, c).best_fitness;
    c.topology = Topology::linear;
    c.neighborhood_delta = 20;
    c.mutation_pmf = {1.0};
    bgl += bgl_pso(obj, 64, c).best_fitness;
  }
  EXPECT_NEAR(bgl / 10, bpso / 10, 3.0);
}

TEST(Swarms, RejectBadSettings) {
  FunctionObjective obj(onemax);
  OptimizerConfig c = small_config(1, 5, 10);
  c.neighborhood_delta = 5;
  EXPECT_THROW(bgl_pso(obj, 8, c), std::invalid_argument);
  c.neighborhood_delta = 2;
  c.mutation_pmf = {0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_THROW(bgl_pso(obj, 8, c), std::invalid_argument);
  EXPECT_THROW(binary_pso(obj, 0, c), std::invalid_argument);
  EXPECT_THROW(binary_pso(obj, 8, small_config(1, 5, 1)), std::invalid_argument);
}

TEST(AllOptimizers, DeterministicAndMonotone) {
  for (Algorithm a : {Algorithm::ga, Algorithm::bpso, Algorithm::bglpso}) {
    DriftingObjective o1, o2;
    SearchResult r1 = run_optimizer(a, o1, 24, small_config(42, 20, 20));
    SearchResult r2 = run_optimizer(a, o2, 24, small_config(42, 20, 20));
    EXPECT_EQ(r1.trajectory, r2.trajectory) << algorithm_name(a);
    EXPECT_EQ(r1.best, r2.best);
    EXPECT_EQ(r1.inertia, r2.inertia);
    EXPECT_TRUE(nondecreasing(r1.trajectory));
    DriftingObjective o3;
    EXPECT_NE(run_optimizer(a, o3, 24, small_config(43, 20, 20)).trajectory, r1.trajectory);
  }
}

TEST(AllOptimizers, ParallelEqualsSerial) {
  CaTaskSettings settings{Task::density, 1, 29, 30, 30};
  for (Algorithm a : {Algorithm::ga, Algorithm::bpso, Algorithm::bglpso}) {
    CaTaskObjective serial_obj(settings, 5), parallel_obj(settings, 5);
    OptimizerConfig c = small_config(8, 6, 20);
    SearchResult serial = run_optimizer(a, serial_obj, 8, c);
    c.workers = 4;
    SearchResult parallel = run_optimizer(a, parallel_obj, 8, c);
    EXPECT_EQ(serial.trajectory, parallel.trajectory);
    EXPECT_EQ(serial.best, parallel.best);
  }
}

TEST(AllOptimizers, StopHookMarksIncomplete) {
  FunctionObjective obj(onemax);
  int polls = 0;
  RunHooks hooks{[&] { return ++polls > 3; }};
  for (Algorithm a : {Algorithm::ga, Algorithm::bpso, Algorithm::bglpso}) {
    polls = 0;
    SearchResult r = run_optimizer(a, obj, 16, small_config(1, 10, 20), hooks);
    EXPECT_FALSE(r.complete);
    EXPECT_EQ(r.trajectory.size(), 3U);
  }
}

TEST(EvaluationErrors, CarryIndexAndPosition) {
  FunctionObjective nan_obj([](const BitString& b) { return b[0] ? std::nan("") : 1.0; });
  std::vector<BitString> candidates = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  try {
    evaluate_all(nan_obj, candidates, 2);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.index(), 2U);
    EXPECT_EQ(e.position(), (std::vector<double>{1, 1}));
  }
  FunctionObjective throwing([](const BitString&) -> double { throw std::runtime_error("boom"); });
  EXPECT_THROW(binary_pso(throwing, 4, small_config(1, 3, 4)), EvaluationError);
  EXPECT_THROW(ga(throwing, 4, small_config(1, 3, 5)), EvaluationError);
}

TEST(ParallelFor, RethrowsLowestIndex) {
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "4");
  }
  std::vector<int> seen(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { seen[i] = 1; });
  EXPECT_EQ(std::accumulate(seen.begin(), seen.end(), 0), 100);
}

TEST(ContinuousPso, Sphere) {
  ContinuousPsoConfig c;
  c.seed = 11;
  ContinuousResult r = continuous_pso(
      [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return -s;
      },
      10, c);
  EXPECT_EQ(r.trajectory.size(), 1000U);
  EXPECT_TRUE(nondecreasing(r.trajectory));
  for (double v : r.best) EXPECT_LT(std::abs(v), 1e-3);
}

TEST(ContinuousPso, ShiftedParabola) {
  ContinuousPsoConfig c;
  c.seed = 2;
  c.epochs = 200;
  ContinuousResult r = continuous_pso([](std::span<const double> x) { return -(x[0] - 3.0) * (x[0] - 3.0); }, 1, c);
  EXPECT_NEAR(r.best[0], 3.0, 0.01);
}

TEST(ContinuousPso, StartsAtOptimum) {
  ContinuousPsoConfig c;
  c.swarm = 4;
  c.epochs = 1;
  c.initial_positions.assign(4, {0.0, 0.0});
  ContinuousResult r = continuous_pso([](std::span<const double> x) { return -(x[0] * x[0] + x[1] * x[1]); }, 2, c);
  EXPECT_EQ(r.best, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(r.best_fitness, 0.0);
}

TEST(ContinuousPso, NonFiniteObjective) {
  ContinuousPsoConfig c;
  c.swarm = 3;
  c.epochs = 2;
  try {
    continuous_pso([](std::span<const double> x) { return x[0] > 0 ? INFINITY : 0.0; }, 1, c);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_GT(e.position()[0], 0.0);
  }
}

TEST(OptimizerConfigJson, RoundTripAndUnknownKeys) {
  OptimizerConfig c;
  c.c1 = 1.5;
  c.topology = Topology::linear;
  c.mutation_pmf = {0.9, 0.1};
  c.inertia_mode = InertiaMode::redraw;
  OptimizerConfig back = optimizer_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_FALSE(to_json(c).contains("workers"));
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"swarm", 3}}), std::invalid_argument);
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"topology", "star"}}), std::invalid_argument);
}
