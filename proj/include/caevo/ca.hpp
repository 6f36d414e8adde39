#pragma once

// One-dimensional, two-state cellular automata on a periodic lattice.
//
// A rule of radius r is stored as its full truth table: bits[p] is the new
// state of a cell whose 2r+1 neighbourhood, read left to right, spells the
// binary number p (leftmost neighbour is the most significant bit). With this
// ordering the table read as an integer, sum(bits[p] * 2^p), is the usual
// Wolfram rule number.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace caevo {

__extension__ typedef unsigned __int128 u128;

// A string of 0/1 values, one per byte. This is the genome type shared by the
// optimizers; a RuleTable is built from one.
using BitString = std::vector<std::uint8_t>;

class RuleTable {
 public:
  static constexpr int kMaxRadius = 7;

  // Throws std::invalid_argument unless 1 <= radius <= kMaxRadius, bits has
  // 2^(2r+1) entries and every entry is 0 or 1.
  RuleTable(int radius, BitString bits);

  static std::size_t table_size(int radius) { return std::size_t{1} << (2 * radius + 1); }

  int radius() const { return radius_; }
  std::size_t size() const { return bits_.size(); }
  const BitString& bits() const { return bits_; }
  std::uint8_t operator[](std::size_t pattern) const { return bits_[pattern]; }

  // Output for an explicit neighbourhood, leftmost cell first.
  std::uint8_t apply(std::span<const std::uint8_t> neighbourhood) const;

  // "r<radius>:<hex>", lowercase, ceil(2^(2r+1)/4) digits, most significant
  // digit holds bits[2^(2r+1)-1].
  std::string to_hex() const;

  // Accepts "r<radius>:<hex>" for any radius, or a decimal rule number which
  // is read as an r=1 rule (0..255). Throws std::invalid_argument on
  // malformed input.
  static RuleTable parse(std::string_view text);

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  int radius_;
  BitString bits_;
};

// Wolfram numbering. Numbers are 128-bit, which covers every rule for
// r <= 3 and the low 128 table entries for larger radii.
// decode_rule throws std::out_of_range when number >= 2^(2^(2r+1)).
RuleTable decode_rule(u128 number, int radius);
// Throws std::out_of_range when the table does not fit in 128 bits (r >= 4
// with any of the upper entries set).
u128 encode_rule(const RuleTable& table);

std::string u128_to_string(u128 value);

// One lattice row, bit-packed least significant bit first: cell i lives in
// word i/64 at bit i%64. Bits past the last cell are always zero.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t width);

  static Configuration from_bits(std::span<const std::uint8_t> cells);
  // '0'/'1' characters; throws std::invalid_argument on anything else.
  static Configuration from_string(std::string_view cells);
  // Hex form of the integer sum(cell[i] * 2^i), exactly ceil(width/4) digits.
  static Configuration from_hex(std::size_t width, std::string_view hex);
  static Configuration all_zeros(std::size_t width) { return Configuration(width); }
  static Configuration all_ones(std::size_t width);
  // Single live cell at `position`. The elementary IC used in the literature
  // places it at 0; single_one_centered puts it at width/2 for rendering.
  static Configuration single_one(std::size_t width, std::size_t position);
  static Configuration single_one_centered(std::size_t width) { return single_one(width, width / 2); }

  std::size_t width() const { return width_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t count_ones() const;
  double density() const { return width_ == 0 ? 0.0 : static_cast<double>(count_ones()) / static_cast<double>(width_); }

  // Cyclic rotation: result[(i + k) mod N] = this[i].
  Configuration rotated(std::ptrdiff_t k) const;

  std::string to_string() const;
  std::string to_hex() const;
  BitString to_bits() const;
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }
  // Clears any bits past the last cell.
  void trim();

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

// 1 when every cell is 1, 0 when every cell is 0, nullopt otherwise (and for
// an empty configuration).
std::optional<bool> uniform_state(const Configuration& config);

// Precomputed stepping kernel for one rule. The lattice is padded by r cells
// on each side (periodic wrap) and updated several cells at a time through a
// lookup table indexed by the padded window.
class Stepper {
 public:
  explicit Stepper(const RuleTable& rule);

  const RuleTable& rule() const { return rule_; }
  int radius() const { return rule_.radius(); }
  int cells_per_lookup() const { return chunk_; }

  // Whether the all-0 / all-1 rows are fixed points of the rule.
  bool fixes_zeros() const { return rule_[0] == 0; }
  bool fixes_ones() const { return rule_[rule_.size() - 1] == 1; }

  // Throws std::length_error when the lattice is narrower than 2r+1.
  Configuration step(const Configuration& in) const;
  // Allocation-free form; `out` is resized as needed and `scratch` holds the
  // padded row between calls.
  void step(const Configuration& in, Configuration& out, std::vector<std::uint64_t>& scratch) const;

 private:
  RuleTable rule_;
  int chunk_;
  std::vector<std::uint8_t> table_;
};

Configuration step(const Configuration& config, const RuleTable& rule);

struct SpacetimeHistory {
  RuleTable rule;
  std::vector<Configuration> rows;  // rows[t] = A_t(s), t = 0..T

  std::size_t steps() const { return rows.empty() ? 0 : rows.size() - 1; }
  std::size_t width() const { return rows.empty() ? 0 : rows.front().width(); }
};

// T+1 rows starting at ic. Once a row is a fixed point of the rule the
// remaining rows are copies, which is exactly what naive stepping produces.
SpacetimeHistory evolve(const Configuration& ic, const RuleTable& rule, std::size_t steps);
SpacetimeHistory evolve(const Configuration& ic, const Stepper& stepper, std::size_t steps);

// Row at time `steps` only, with the same fixed-point early exit.
Configuration evolve_final(const Configuration& ic, const Stepper& stepper, std::size_t steps);

}  // namespace caevo
