#pragma once

// Task fitness functions for evolved CA rules.
//
// Density classification: an IC with a majority of 1s must relax to all 1s
// within T steps, a minority IC to all 0s. F100 is the fraction of a batch of
// ICs classified correctly, the batch drawn from the "flat" distribution in
// which the number of 1s (not each bit) is uniform.
//
// Chaos generation: reward rules whose spacetime output compresses poorly.
// K(x) is approximated by the normalised DEFLATE size of x.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caevo/ca.hpp"
#include "caevo/objective.hpp"
#include "caevo/rng.hpp"

namespace caevo {

enum class Task { density, chaos };

std::string_view task_name(Task task);
// Throws std::invalid_argument for anything but "density" / "chaos".
Task parse_task(std::string_view name);

struct ICBatch {
  std::size_t width = 0;
  std::uint64_t seed = 0;
  std::vector<Configuration> ics;
  std::vector<double> densities;  // densities[i] == ics[i].density()

  std::size_t size() const { return ics.size(); }
};

// Number of 1s uniform on {0..n}, positions uniform without replacement.
Configuration sample_flat_ic(std::size_t n, Rng& rng);
ICBatch make_flat_batch(std::size_t width, std::size_t count, std::uint64_t seed);
ICBatch make_batch(std::vector<Configuration> ics, std::uint64_t seed = 0);

// {"seed": .., "n": .., "ics": ["<hex>", ...]} with Configuration::to_hex.
std::string batch_to_json(const ICBatch& batch);
ICBatch batch_from_json(std::string_view text);

struct FitnessValue {
  double value = 0.0;
  Task task = Task::density;
};

// True when the row at time `steps` is uniform and agrees with the IC's
// majority. Throws std::domain_error for even widths (density 1/2 is
// unclassifiable).
bool classify_density(const Stepper& stepper, const Configuration& ic, std::size_t steps);
bool classify_density(const RuleTable& rule, const Configuration& ic, std::size_t steps);

// Fraction of the batch classified correctly. Throws std::invalid_argument on
// an empty batch.
FitnessValue f100(const Stepper& stepper, const ICBatch& batch, std::size_t steps);
FitnessValue f100(const RuleTable& rule, const ICBatch& batch, std::size_t steps);

// compressed_size(data) / size(data). Throws std::invalid_argument when empty.
double nc(std::span<const unsigned char> data);
double nc(std::string_view data);

// One byte per cell, '0' or '1', rows concatenated in time order.
std::string serialize(const Configuration& row);
std::string serialize(const SpacetimeHistory& history);

// Piecewise-total normalised compression of a history with T+1 rows:
//   piecewise = (sum over all T+1 rows of nc(row)) / T
//   total     = nc(all rows concatenated)
//   result    = (piecewise + total) / 2
// The piecewise sum is divided by T, not T+1. Throws std::invalid_argument
// for histories with fewer than two rows.
double nc_pt(const SpacetimeHistory& history);

// Mean nc_pt over the batch. Throws std::invalid_argument on an empty batch.
FitnessValue chaos_fitness(const Stepper& stepper, const ICBatch& batch, std::size_t steps);
FitnessValue chaos_fitness(const RuleTable& rule, const ICBatch& batch, std::size_t steps);

struct CaTaskSettings {
  Task task = Task::density;
  int radius = 3;
  std::size_t width = 149;
  std::size_t steps = 150;
  std::size_t batch_size = 100;
};

// Rule-table objective for the optimizers: genomes are rule tables of the
// configured radius, and the IC batch is resampled from the flat
// distribution at the start of every epoch (seeded by seed and epoch).
class CaTaskObjective final : public BitObjective {
 public:
  CaTaskObjective(CaTaskSettings settings, std::uint64_t seed);

  void begin_epoch(std::uint64_t epoch) override;
  double evaluate(const BitString& bits) const override;

  // Score on an explicit batch, independent of the epoch state.
  double evaluate_on(const BitString& bits, const ICBatch& batch) const;

  const CaTaskSettings& settings() const { return settings_; }
  const ICBatch& batch() const { return batch_; }
  std::size_t genome_length() const { return RuleTable::table_size(settings_.radius); }

 private:
  CaTaskSettings settings_;
  std::uint64_t seed_;
  ICBatch batch_;
};

}  // namespace caevo
