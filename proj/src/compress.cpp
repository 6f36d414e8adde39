#include "caevo/compress.hpp"

#include <zlib.h>

#include <array>
#include <stdexcept>
#include <vector>

namespace caevo {

namespace {

constexpr int kLevel = 9;
constexpr int kWindowBits = 15;
constexpr int kMemLevel = 8;

// One encoder per thread, reset between calls.
class Deflater {
 public:
  Deflater() {
    if (deflateInit2(&stream_, kLevel, Z_DEFLATED, -kWindowBits, kMemLevel, Z_DEFAULT_STRATEGY) != Z_OK) {
      throw std::runtime_error("deflateInit2 failed");
    }
  }
  ~Deflater() { deflateEnd(&stream_); }
  Deflater(const Deflater&) = delete;
  Deflater& operator=(const Deflater&) = delete;

  std::size_t compressed_size(const unsigned char* data, std::size_t size) {
    if (deflateReset(&stream_) != Z_OK) throw std::runtime_error("deflateReset failed");
    stream_.next_in = const_cast<unsigned char*>(data);
    stream_.avail_in = static_cast<uInt>(size);
    std::size_t total = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
      stream_.next_out = sink_.data();
      stream_.avail_out = static_cast<uInt>(sink_.size());
      rc = deflate(&stream_, Z_FINISH);
      if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) throw std::runtime_error("deflate failed");
      total += sink_.size() - stream_.avail_out;
    }
    return total;
  }

 private:
  z_stream stream_{};
  std::array<unsigned char, 16384> sink_{};
};

Deflater& thread_deflater() {
  thread_local Deflater deflater;
  return deflater;
}

}  // namespace

std::size_t deflate_size(std::span<const unsigned char> data) {
  return thread_deflater().compressed_size(data.data(), data.size());
}

std::size_t deflate_size(std::string_view data) {
  return thread_deflater().compressed_size(reinterpret_cast<const unsigned char*>(data.data()), data.size());
}

std::string compressor_id() {
  return std::string("zlib-") + zlibVersion() + "/raw-deflate/level=" + std::to_string(kLevel) +
         "/wbits=" + std::to_string(kWindowBits) + "/memlevel=" + std::to_string(kMemLevel);
}

}  // namespace caevo
