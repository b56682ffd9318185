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


#include <gtest/gtest.h>

#include "properties.hpp"

#ifndef IMGSLIM_FIXTURE_DIR
#error "IMGSLIM_FIXTURE_DIR must be defined"
#endif

namespace imgslim::testing {
namespace {

constexpr std::uint64_t kSeed = 7;

void expect_pass(const Outcome& o) { EXPECT_TRUE(o.pass) << o.describe(); }

TEST(Properties, ShellCommandChain) { expect_pass(check_shell_chain()); }
TEST(Properties, CommandListAgainstOracle) { expect_pass(check_cll_properties(kSeed, 150, 20)); }
TEST(Properties, ElfClosureAgainstOracle) { expect_pass(check_elf_closure(kSeed, 20)); }
TEST(Properties, FlattenAgainstOracle) { expect_pass(check_flatten(kSeed, 60)); }
TEST(Properties, ArchiveRoundTrip) { expect_pass(check_roundtrip()); }
TEST(Properties, StaticCoverage) { expect_pass(check_static_coverage()); }
TEST(Properties, NoEntrypoint) { expect_pass(check_no_entrypoint()); }
TEST(Properties, ReportArithmetic) {
  expect_pass(check_report_arithmetic(std::filesystem::path(IMGSLIM_FIXTURE_DIR) / "listings"));
}
TEST(Properties, PruningSafety) { expect_pass(check_safety(kSeed, 60)); }

}  // namespace
}  // namespace imgslim::testing
