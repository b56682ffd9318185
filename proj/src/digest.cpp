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

#include "imgslim/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "imgslim/error.hpp"

namespace imgslim {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("sha256: digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_digest(std::string_view data) {
  return "sha256:" + sha256_hex(data);
}

DigestParts parse_digest(std::string_view digest) {
  auto colon = digest.find(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == digest.size()) {
    throw FormatError("malformed digest '" + std::string(digest) + "'");
  }
  DigestParts parts{std::string(digest.substr(0, colon)),
                    std::string(digest.substr(colon + 1))};
  for (char c : parts.encoded) {
    bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) {
      throw FormatError("malformed digest '" + std::string(digest) + "'");
    }
  }
  return parts;
}

void verify_digest(std::string_view data, std::string_view expected,
                   std::string_view what) {
  auto parts = parse_digest(expected);
  if (parts.algorithm != "sha256") {
    throw UnsupportedFormatError("unsupported digest algorithm '" +
                                 parts.algorithm + "' for " +
                                 std::string(what));
  }
  std::string actual = sha256_hex(data);
  if (actual != parts.encoded) {
    throw IntegrityError("digest mismatch for " + std::string(what) +
                         ": expected " + std::string(expected) +
                         ", content hashes to sha256:" + actual);
  }
}

}  // namespace imgslim
