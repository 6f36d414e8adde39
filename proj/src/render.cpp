#include "caevo/render.hpp"

#include <zlib.h>

#include <fstream>
#include <stdexcept>

namespace caevo {

Bitmap rasterize(const SpacetimeHistory& history, std::size_t scale) {
  if (scale == 0) throw std::invalid_argument("pixel scale must be at least 1");
  Bitmap image;
  image.width = history.width() * scale;
  image.height = history.rows.size() * scale;
  image.pixels.assign(image.width * image.height, 0);
  for (std::size_t t = 0; t < history.rows.size(); ++t) {
    const Configuration& row = history.rows[t];
    for (std::size_t i = 0; i < row.width(); ++i) {
      if (!row.get(i)) continue;
      for (std::size_t dy = 0; dy < scale; ++dy) {
        for (std::size_t dx = 0; dx < scale; ++dx) image.pixels[(t * scale + dy) * image.width + i * scale + dx] = 1;
      }
    }
  }
  return image;
}

std::string encode_pbm(const Bitmap& image) {
  std::string out = "P4\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n";
  const std::size_t row_bytes = (image.width + 7) / 8;
  for (std::size_t y = 0; y < image.height; ++y) {
    std::string row(row_bytes, '\0');
    for (std::size_t x = 0; x < image.width; ++x) {
      if (image.at(x, y)) row[x / 8] = static_cast<char>(row[x / 8] | (0x80 >> (x % 8)));
    }
    out += row;
  }
  return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
                   crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(const Bitmap& image) {
  std::string raw;
  raw.reserve(image.height * (image.width + 1));
  for (std::size_t y = 0; y < image.height; ++y) {
    raw.push_back('\0');  // filter: none
    for (std::size_t x = 0; x < image.width; ++x) raw.push_back(image.at(x, y) ? '\0' : static_cast<char>(0xff));
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw std::runtime_error("PNG compression failed");
  }
  packed.resize(packed_size);

  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr += std::string("\x08\x00\x00\x00\x00", 5);  // 8-bit greyscale, deflate, adaptive, no interlace

  std::string out("\x89PNG\r\n\x1a\n", 8);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", "");
  return out;
}

std::string history_text(const SpacetimeHistory& history) {
  std::string out;
  for (const auto& row : history.rows) {
    out += row.to_string();
    out += '\n';
  }
  return out;
}

void write_binary_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace caevo
