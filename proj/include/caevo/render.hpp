#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "caevo/ca.hpp"

namespace caevo {

// Monochrome image, row-major, 1 = black.
struct Bitmap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

// Row t of the image is the configuration at time t (top row = IC), each
// cell drawn as a scale x scale block.
Bitmap rasterize(const SpacetimeHistory& history, std::size_t scale = 1);

// Binary PBM ("P4\n<w> <h>\n", rows packed MSB first and padded to a byte).
std::string encode_pbm(const Bitmap& image);
// 8-bit greyscale PNG of the same pixels (black = 0, white = 255).
std::string encode_png(const Bitmap& image);

// Rows of '0'/'1' characters, one line per time step.
std::string history_text(const SpacetimeHistory& history);

// Throws std::runtime_error when the file cannot be written.
void write_binary_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace caevo
