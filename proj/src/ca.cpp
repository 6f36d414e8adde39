#include "caevo/ca.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

namespace caevo {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

// Bits given least significant first, rendered most significant digit first.
template <typename BitAt>
std::string bits_to_hex(std::size_t count, BitAt bit_at) {
  const std::size_t digits = (count + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    int v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = 4 * d + b;
      if (i < count && bit_at(i)) v |= 1 << b;
    }
    out[digits - 1 - d] = kHexDigits[v];
  }
  return out;
}

// Inverse of bits_to_hex; bits above `count` must be zero.
BitString hex_to_bits(std::size_t count, std::string_view hex) {
  const std::size_t digits = (count + 3) / 4;
  if (hex.size() != digits) {
    throw std::invalid_argument("expected " + std::to_string(digits) + " hex digits, got " +
                                std::to_string(hex.size()));
  }
  BitString bits(count, 0);
  for (std::size_t d = 0; d < digits; ++d) {
    const int v = hex_value(hex[digits - 1 - d]);
    if (v < 0) throw std::invalid_argument("invalid hex digit in '" + std::string(hex) + "'");
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = 4 * d + b;
      if (((v >> b) & 1) == 0) continue;
      if (i >= count) throw std::invalid_argument("hex value has bits set beyond width " + std::to_string(count));
      bits[i] = 1;
    }
  }
  return bits;
}

std::size_t word_count(std::size_t width) { return (width + 63) / 64; }

}  // namespace

// ---------------------------------------------------------------------------
// RuleTable

RuleTable::RuleTable(int radius, BitString bits) : radius_(radius), bits_(std::move(bits)) {
  if (radius < 1 || radius > kMaxRadius) {
    throw std::invalid_argument("rule radius must be in [1, " + std::to_string(kMaxRadius) + "], got " +
                                std::to_string(radius));
  }
  if (bits_.size() != table_size(radius)) {
    throw std::invalid_argument("rule table for radius " + std::to_string(radius) + " needs " +
                                std::to_string(table_size(radius)) + " entries, got " +
                                std::to_string(bits_.size()));
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw std::invalid_argument("rule table entries must be 0 or 1");
  }
}

std::uint8_t RuleTable::apply(std::span<const std::uint8_t> neighbourhood) const {
  if (neighbourhood.size() != static_cast<std::size_t>(2 * radius_ + 1)) {
    throw std::invalid_argument("neighbourhood size does not match rule radius");
  }
  std::size_t pattern = 0;
  for (std::uint8_t cell : neighbourhood) pattern = (pattern << 1) | (cell & 1U);
  return bits_[pattern];
}

std::string RuleTable::to_hex() const {
  return "r" + std::to_string(radius_) + ":" + bits_to_hex(bits_.size(), [&](std::size_t i) { return bits_[i] != 0; });
}

RuleTable RuleTable::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rule string");
  if (text.front() == 'r') {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("rule string missing ':' in '" + std::string(text) + "'");
    int radius = 0;
    const auto rad = text.substr(1, colon - 1);
    auto [ptr, ec] = std::from_chars(rad.data(), rad.data() + rad.size(), radius);
    if (ec != std::errc{} || ptr != rad.data() + rad.size()) {
      throw std::invalid_argument("bad radius in rule string '" + std::string(text) + "'");
    }
    if (radius < 1 || radius > kMaxRadius) throw std::invalid_argument("rule radius out of range in '" + std::string(text) + "'");
    return RuleTable(radius, hex_to_bits(table_size(radius), text.substr(colon + 1)));
  }
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("rule must be 'r<radius>:<hex>' or a decimal r=1 rule number, got '" + std::string(text) + "'");
  }
  if (value > 255) throw std::invalid_argument("decimal rule numbers are r=1 only (0..255), got " + std::string(text));
  return decode_rule(value, 1);
}

RuleTable decode_rule(u128 number, int radius) {
  if (radius < 1 || radius > RuleTable::kMaxRadius) throw std::out_of_range("rule radius out of range");
  const std::size_t size = RuleTable::table_size(radius);
  if (size < 128 && (number >> size) != 0) {
    throw std::out_of_range("rule number " + u128_to_string(number) + " out of range for radius " + std::to_string(radius));
  }
  BitString bits(size, 0);
  for (std::size_t p = 0; p < std::min<std::size_t>(size, 128); ++p) bits[p] = static_cast<std::uint8_t>((number >> p) & 1U);
  return RuleTable(radius, std::move(bits));
}

u128 encode_rule(const RuleTable& table) {
  u128 number = 0;
  for (std::size_t p = 0; p < table.size(); ++p) {
    if (!table[p]) continue;
    if (p >= 128) throw std::out_of_range("rule number does not fit in 128 bits; use the hex form");
    number |= u128{1} << p;
  }
  return number;
}

std::string u128_to_string(u128 value) {
  if (value == 0) return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

Configuration::Configuration(std::size_t width) : width_(width), words_(word_count(width), 0) {}

Configuration Configuration::from_bits(std::span<const std::uint8_t> cells) {
  Configuration c(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] > 1) throw std::invalid_argument("cell values must be 0 or 1");
    if (cells[i]) c.set(i, true);
  }
  return c;
}

Configuration Configuration::from_string(std::string_view cells) {
  Configuration c(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] == '1') {
      c.set(i, true);
    } else if (cells[i] != '0') {
      throw std::invalid_argument("configuration string may contain only '0' and '1'");
    }
  }
  return c;
}

Configuration Configuration::from_hex(std::size_t width, std::string_view hex) {
  const BitString bits = hex_to_bits(width, hex);
  return from_bits(bits);
}

Configuration Configuration::all_ones(std::size_t width) {
  Configuration c(width);
  std::fill(c.words_.begin(), c.words_.end(), ~std::uint64_t{0});
  c.trim();
  return c;
}

Configuration Configuration::single_one(std::size_t width, std::size_t position) {
  if (position >= width) throw std::out_of_range("single-one position outside the lattice");
  Configuration c(width);
  c.set(position, true);
  return c;
}

void Configuration::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t Configuration::count_ones() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Configuration Configuration::rotated(std::ptrdiff_t k) const {
  Configuration out(width_);
  if (width_ == 0) return out;
  const auto n = static_cast<std::ptrdiff_t>(width_);
  const std::ptrdiff_t shift = ((k % n) + n) % n;
  for (std::size_t i = 0; i < width_; ++i) {
    if (get(i)) out.set(static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i) + shift) % n), true);
  }
  return out;
}

std::string Configuration::to_string() const {
  std::string s(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

std::string Configuration::to_hex() const {
  return bits_to_hex(width_, [&](std::size_t i) { return get(i); });
}

BitString Configuration::to_bits() const {
  BitString bits(width_);
  for (std::size_t i = 0; i < width_; ++i) bits[i] = get(i) ? 1 : 0;
  return bits;
}

void Configuration::trim() {
  if (width_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
}

std::optional<bool> uniform_state(const Configuration& config) {
  const std::size_t ones = config.count_ones();
  if (config.width() == 0) return std::nullopt;
  if (ones == 0) return false;
  if (ones == config.width()) return true;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Stepper

namespace {

// Cells produced per table lookup: the widest of 8/4/2/1 whose padded window
// (2r + chunk bits) stays within a 4096-entry table, so that building the
// table is cheap compared with a batch evaluation.
int choose_chunk(int radius) {
  for (int c : {8, 4, 2}) {
    if (2 * radius + c <= 12) return c;
  }
  return 1;
}

}  // namespace

Stepper::Stepper(const RuleTable& rule) : rule_(rule), chunk_(choose_chunk(rule.radius())) {
  const int span = 2 * rule_.radius() + 1;
  const std::size_t span_mask = (std::size_t{1} << span) - 1;

  // by_window[m]: rule output when the neighbourhood is given least
  // significant bit = leftmost cell (the order cells sit in a packed word).
  std::vector<std::uint8_t> by_window(std::size_t{1} << span);
  for (std::size_t m = 0; m < by_window.size(); ++m) {
    std::size_t pattern = 0;
    for (int j = 0; j < span; ++j) pattern = (pattern << 1) | ((m >> j) & 1U);
    by_window[m] = rule_[pattern];
  }

  const int width = 2 * rule_.radius() + chunk_;
  table_.resize(std::size_t{1} << width);
  for (std::size_t w = 0; w < table_.size(); ++w) {
    std::uint8_t out = 0;
    for (int k = 0; k < chunk_; ++k) out |= static_cast<std::uint8_t>(by_window[(w >> k) & span_mask] << k);
    table_[w] = out;
  }
}

Configuration Stepper::step(const Configuration& in) const {
  Configuration out;
  std::vector<std::uint64_t> scratch;
  step(in, out, scratch);
  return out;
}

void Stepper::step(const Configuration& in, Configuration& out, std::vector<std::uint64_t>& scratch) const {
  const std::size_t n = in.width();
  const int r = rule_.radius();
  if (n < static_cast<std::size_t>(2 * r + 1)) {
    throw std::length_error("lattice width " + std::to_string(n) + " is narrower than the neighbourhood (" +
                            std::to_string(2 * r + 1) + ")");
  }

  // Padded row: bit i + r holds cell i, the first r bits hold the last r
  // cells, the r bits after the row hold the first r cells. One spare zero
  // word lets the window read below always touch two words.
  const auto cells = in.words();
  const std::size_t padded_bits = n + 2 * static_cast<std::size_t>(r);
  scratch.assign(word_count(padded_bits) + 1, 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    scratch[k] |= cells[k] << r;
    scratch[k + 1] |= cells[k] >> (64 - r);
  }
  for (int j = 0; j < r; ++j) {
    const std::size_t tail = n - static_cast<std::size_t>(r) + static_cast<std::size_t>(j);
    if (in.get(tail)) scratch[static_cast<std::size_t>(j) >> 6] |= std::uint64_t{1} << (j & 63);
    const std::size_t pos = n + static_cast<std::size_t>(r + j);
    if (in.get(static_cast<std::size_t>(j))) scratch[pos >> 6] |= std::uint64_t{1} << (pos & 63);
  }

  if (out.width() != n) out = Configuration(n);
  auto dst = out.mutable_words();
  std::fill(dst.begin(), dst.end(), 0);

  const int window = 2 * r + chunk_;
  const std::uint64_t window_mask = (std::uint64_t{1} << window) - 1;
  const std::uint8_t* table = table_.data();
  const std::uint64_t* src = scratch.data();
  for (std::size_t pos = 0; pos < n; pos += static_cast<std::size_t>(chunk_)) {
    const std::size_t q = pos >> 6;
    const unsigned s = pos & 63;
    std::uint64_t w = src[q] >> s;
    if (s + static_cast<unsigned>(window) > 64) w |= src[q + 1] << (64 - s);
    dst[q] |= static_cast<std::uint64_t>(table[w & window_mask]) << s;
  }
  out.trim();
}

Configuration step(const Configuration& config, const RuleTable& rule) { return Stepper(rule).step(config); }

SpacetimeHistory evolve(const Configuration& ic, const RuleTable& rule, std::size_t steps) {
  return evolve(ic, Stepper(rule), steps);
}

SpacetimeHistory evolve(const Configuration& ic, const Stepper& stepper, std::size_t steps) {
  SpacetimeHistory history{stepper.rule(), {}};
  history.rows.reserve(steps + 1);
  history.rows.push_back(ic);
  std::vector<std::uint64_t> scratch;
  bool fixed = false;
  for (std::size_t t = 0; t < steps; ++t) {
    if (fixed) {
      history.rows.push_back(history.rows.back());
      continue;
    }
    Configuration next;
    stepper.step(history.rows.back(), next, scratch);
    fixed = next == history.rows.back();
    history.rows.push_back(std::move(next));
  }
  return history;
}

Configuration evolve_final(const Configuration& ic, const Stepper& stepper, std::size_t steps) {
  Configuration current = ic;
  Configuration next;
  std::vector<std::uint64_t> scratch;
  for (std::size_t t = 0; t < steps; ++t) {
    stepper.step(current, next, scratch);
    if (next == current) break;
    std::swap(current, next);
  }
  return current;
}

}  // namespace caevo
