#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "caevo/ca.hpp"

namespace caevo {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// IC specs: "single-one" (centred unless `at` is given), "all-zeros",
// "all-ones", "density:<rho>" (round(rho*n) ones placed from `seed`), or
// "hex:<digits>" in Configuration::to_hex form. Throws std::invalid_argument.
Configuration parse_ic_spec(std::string_view spec, std::size_t n, std::optional<std::size_t> at = std::nullopt,
                            std::uint64_t seed = 0);

// Entry point for the `caevo` tool: evolve, simulate, render, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace caevo
