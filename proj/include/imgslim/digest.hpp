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

#pragma once

#include <string>
#include <string_view>

namespace imgslim {

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// "sha256:<hex>" as used in OCI descriptors and docker diff_ids.
std::string sha256_digest(std::string_view data);

// Splits "alg:hex" and validates the encoded part. Throws FormatError.
struct DigestParts {
  std::string algorithm;
  std::string encoded;
};
DigestParts parse_digest(std::string_view digest);

// Recomputes and compares; throws IntegrityError naming `what` on mismatch
// and UnsupportedFormatError for algorithms other than sha256.
void verify_digest(std::string_view data, std::string_view expected,
                   std::string_view what);

}  // namespace imgslim
