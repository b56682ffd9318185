// Copyright 2026 The imgslim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "imgslim/gzip.hpp"

#include <zlib.h>

#include <array>
#include <climits>

#include "imgslim/error.hpp"

namespace imgslim {

namespace {
constexpr int kGzipWindowBits = 15 + 16;
constexpr std::size_t kChunk = 1 << 16;
}  // namespace

bool is_gzip(std::string_view data) {
  return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
         static_cast<unsigned char>(data[1]) == 0x8b;
}

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, 6, Z_DEFLATED, kGzipWindowBits, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("gzip: deflateInit2 failed");
  }
  std::string out;
  std::array<char, kChunk> buf{};
  std::size_t offset = 0;
  int flush = Z_NO_FLUSH;
  int rc = Z_OK;
  do {
    std::size_t avail = std::min<std::size_t>(data.size() - offset, UINT_MAX);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data() + offset));
    zs.avail_in = static_cast<uInt>(avail);
    offset += avail;
    flush = offset == data.size() ? Z_FINISH : Z_NO_FLUSH;
    do {
      zs.next_out = reinterpret_cast<Bytef*>(buf.data());
      zs.avail_out = static_cast<uInt>(buf.size());
      rc = deflate(&zs, flush);
      out.append(buf.data(), buf.size() - zs.avail_out);
    } while (zs.avail_out == 0);
  } while (flush != Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("gzip: deflate did not finish");
  return out;
}

std::string gzip_decompress(std::string_view data) {
  std::string out;
  std::array<char, kChunk> buf{};
  std::size_t offset = 0;
  // Concatenated members are legal gzip; inflate each in turn.
  while (offset < data.size()) {
    z_stream zs{};
    if (inflateInit2(&zs, kGzipWindowBits) != Z_OK) {
      throw Error("gzip: inflateInit2 failed");
    }
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
      std::size_t avail = std::min<std::size_t>(data.size() - offset, UINT_MAX);
      if (avail == 0) {
        inflateEnd(&zs);
        throw FormatError("gzip: truncated stream");
      }
      zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data() + offset));
      zs.avail_in = static_cast<uInt>(avail);
      do {
        zs.next_out = reinterpret_cast<Bytef*>(buf.data());
        zs.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
          inflateEnd(&zs);
          throw FormatError("gzip: corrupt stream");
        }
        out.append(buf.data(), buf.size() - zs.avail_out);
      } while (zs.avail_out == 0 && rc != Z_STREAM_END);
      offset += avail - zs.avail_in;
    }
    inflateEnd(&zs);
    // Trailing zero padding after the last member is tolerated.
    if (offset < data.size() && !is_gzip(data.substr(offset))) break;
  }
  return out;
}

}  // namespace imgslim
