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


// Acceptance properties shared by the gtest suites and the acceptance runner.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace imgslim::testing {

struct Outcome {
  bool pass = true;
  std::size_t cases = 0;
  std::vector<std::string> failures;
  std::string note;

  void fail(std::string message);
  void check(bool ok, const std::string& message) {
    if (!ok) fail(message);
  }
  std::string describe() const;
};

Outcome check_shell_chain();
Outcome check_cll_properties(std::uint64_t seed, int cases, int kernel_cases);
Outcome check_elf_closure(std::uint64_t seed, int random_cases);
Outcome check_flatten(std::uint64_t seed, int cases);
Outcome check_roundtrip();
Outcome check_static_coverage();
Outcome check_no_entrypoint();
Outcome check_report_arithmetic(const std::filesystem::path& listings_dir);
Outcome check_safety(std::uint64_t seed, int cases);

}  // namespace imgslim::testing
