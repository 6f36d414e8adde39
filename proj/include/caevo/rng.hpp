#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace caevo {

// Stable 64-bit mixer (splitmix64 finalizer). Used for every seed derivation
// so that results do not depend on library-specific seeding behaviour.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a parent seed and a stream index.
// derive_seed(s, i) never depends on any other index, so adding trials,
// particles or epochs leaves earlier streams untouched.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

// Same, keyed by a short tag ("batch", "holdout", ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the mappings to doubles and bounded integers are
// done here rather than through <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., bound - 1}; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform on {lo, ..., hi}.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace caevo
