#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace caevo {

// Raw DEFLATE (RFC 1951, no zlib/gzip container) at compression level 9,
// 32 KiB window, memLevel 8, default strategy. These settings are fixed;
// fitness values depend on the exact encoder, so every result file records
// compressor_id().
std::size_t deflate_size(std::span<const unsigned char> data);
std::size_t deflate_size(std::string_view data);

// "zlib-<version>/raw-deflate/level=9/wbits=15/memlevel=8"
std::string compressor_id();

}  // namespace caevo
