#include "caevo/objectives.hpp"

#include <numeric>
#include <stdexcept>

#include "caevo/compress.hpp"
#include "json.hpp"

namespace caevo {

std::string_view task_name(Task task) { return task == Task::density ? "density" : "chaos"; }

Task parse_task(std::string_view name) {
  if (name == "density") return Task::density;
  if (name == "chaos") return Task::chaos;
  throw std::invalid_argument("unknown task '" + std::string(name) + "' (expected density or chaos)");
}

// ---------------------------------------------------------------------------
// IC sampling

Configuration sample_flat_ic(std::size_t n, Rng& rng) {
  Configuration ic(n);
  const std::size_t ones = rng.between(0, n);
  // Partial Fisher-Yates: the first `ones` slots become a uniform k-subset.
  std::vector<std::size_t> slots(n);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  for (std::size_t i = 0; i < ones; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(slots[i], slots[j]);
    ic.set(slots[i], true);
  }
  return ic;
}

ICBatch make_batch(std::vector<Configuration> ics, std::uint64_t seed) {
  ICBatch batch;
  batch.seed = seed;
  batch.width = ics.empty() ? 0 : ics.front().width();
  for (const auto& ic : ics) {
    if (ic.width() != batch.width) throw std::invalid_argument("all ICs in a batch must share one width");
    batch.densities.push_back(ic.density());
  }
  batch.ics = std::move(ics);
  return batch;
}

ICBatch make_flat_batch(std::size_t width, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Configuration> ics;
  ics.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ics.push_back(sample_flat_ic(width, rng));
  ICBatch batch = make_batch(std::move(ics), seed);
  batch.width = width;
  return batch;
}

std::string batch_to_json(const ICBatch& batch) {
  nlohmann::json doc;
  doc["seed"] = batch.seed;
  doc["n"] = batch.width;
  auto& ics = doc["ics"] = nlohmann::json::array();
  for (const auto& ic : batch.ics) ics.push_back(ic.to_hex());
  return doc.dump(2);
}

ICBatch batch_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  for (const auto& [key, value] : doc.items()) {
    if (key != "seed" && key != "n" && key != "ics") throw std::invalid_argument("unknown key in IC batch: " + key);
  }
  const auto width = doc.at("n").get<std::size_t>();
  std::vector<Configuration> ics;
  for (const auto& hex : doc.at("ics")) ics.push_back(Configuration::from_hex(width, hex.get<std::string>()));
  ICBatch batch = make_batch(std::move(ics), doc.at("seed").get<std::uint64_t>());
  batch.width = width;
  return batch;
}

// ---------------------------------------------------------------------------
// Density classification

bool classify_density(const Stepper& stepper, const Configuration& ic, std::size_t steps) {
  if (ic.width() % 2 == 0) {
    throw std::domain_error("density classification needs an odd lattice width, got " + std::to_string(ic.width()));
  }
  const bool majority_ones = 2 * ic.count_ones() > ic.width();
  const auto final_state = uniform_state(evolve_final(ic, stepper, steps));
  return final_state.has_value() && *final_state == majority_ones;
}

bool classify_density(const RuleTable& rule, const Configuration& ic, std::size_t steps) {
  return classify_density(Stepper(rule), ic, steps);
}

FitnessValue f100(const Stepper& stepper, const ICBatch& batch, std::size_t steps) {
  if (batch.ics.empty()) throw std::invalid_argument("f100 needs a nonempty IC batch");
  std::size_t correct = 0;
  for (const auto& ic : batch.ics) correct += classify_density(stepper, ic, steps) ? 1 : 0;
  return {static_cast<double>(correct) / static_cast<double>(batch.size()), Task::density};
}

FitnessValue f100(const RuleTable& rule, const ICBatch& batch, std::size_t steps) {
  return f100(Stepper(rule), batch, steps);
}

// ---------------------------------------------------------------------------
// Compression objective

double nc(std::span<const unsigned char> data) {
  if (data.empty()) throw std::invalid_argument("nc of empty input");
  return static_cast<double>(deflate_size(data)) / static_cast<double>(data.size());
}

double nc(std::string_view data) {
  if (data.empty()) throw std::invalid_argument("nc of empty input");
  return static_cast<double>(deflate_size(data)) / static_cast<double>(data.size());
}

std::string serialize(const Configuration& row) { return row.to_string(); }

std::string serialize(const SpacetimeHistory& history) {
  std::string out;
  out.reserve(history.rows.size() * history.width());
  for (const auto& row : history.rows) out += row.to_string();
  return out;
}

double nc_pt(const SpacetimeHistory& history) {
  if (history.rows.size() < 2) throw std::invalid_argument("nc_pt needs a history with at least two rows");
  if (history.width() == 0) throw std::invalid_argument("nc_pt of an empty lattice");
  const std::string all = serialize(history);
  const std::size_t width = history.width();
  double piecewise = 0.0;
  for (std::size_t t = 0; t < history.rows.size(); ++t) {
    piecewise += nc(std::string_view(all).substr(t * width, width));
  }
  piecewise /= static_cast<double>(history.steps());
  const double total = nc(all);
  return 0.5 * (piecewise + total);
}

FitnessValue chaos_fitness(const Stepper& stepper, const ICBatch& batch, std::size_t steps) {
  if (batch.ics.empty()) throw std::invalid_argument("chaos fitness needs a nonempty IC batch");
  double sum = 0.0;
  for (const auto& ic : batch.ics) sum += nc_pt(evolve(ic, stepper, steps));
  return {sum / static_cast<double>(batch.size()), Task::chaos};
}

FitnessValue chaos_fitness(const RuleTable& rule, const ICBatch& batch, std::size_t steps) {
  return chaos_fitness(Stepper(rule), batch, steps);
}

// ---------------------------------------------------------------------------
// Optimizer adapter

CaTaskObjective::CaTaskObjective(CaTaskSettings settings, std::uint64_t seed) : settings_(settings), seed_(seed) {
  if (settings_.task == Task::density && settings_.width % 2 == 0) {
    throw std::invalid_argument("density task needs an odd lattice width");
  }
  if (settings_.batch_size == 0) throw std::invalid_argument("IC batch size must be positive");
  if (settings_.width < static_cast<std::size_t>(2 * settings_.radius + 1)) {
    throw std::invalid_argument("lattice narrower than the rule neighbourhood");
  }
  begin_epoch(0);
}

void CaTaskObjective::begin_epoch(std::uint64_t epoch) {
  batch_ = make_flat_batch(settings_.width, settings_.batch_size, derive_seed(seed_, epoch));
}

double CaTaskObjective::evaluate(const BitString& bits) const { return evaluate_on(bits, batch_); }

double CaTaskObjective::evaluate_on(const BitString& bits, const ICBatch& batch) const {
  const Stepper stepper(RuleTable(settings_.radius, bits));
  return settings_.task == Task::density ? f100(stepper, batch, settings_.steps).value
                                         : chaos_fitness(stepper, batch, settings_.steps).value;
}

}  // namespace caevo
