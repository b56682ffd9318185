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

#include "fixtures.hpp"
#include "imgslim/error.hpp"
#include "imgslim/rootfs_model.hpp"

namespace imgslim {
namespace {

using testing::RootfsBuilder;
using Status = Resolution::Status;

TEST(Resolve, FollowsRelativeAbsoluteAndDirectoryLinks) {
  RootfsBuilder b;
  b.exe("/usr/bin/dash").symlink("/usr/bin/sh", "dash").symlink("/bin", "usr/bin");
  b.symlink("/etc/alternatives/shell", "/bin/sh");
  auto info = b.info();

  Resolution r = info.realpath("/etc/alternatives/shell");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.path, "/usr/bin/dash");
  EXPECT_EQ(r.visited, (std::vector<std::string>{"/etc", "/etc/alternatives",
                                                 "/etc/alternatives/shell", "/bin", "/usr",
                                                 "/usr/bin", "/usr/bin/sh", "/usr/bin/dash"}));

  Resolution l = info.lstat("/bin/sh");
  ASSERT_TRUE(l.ok());
  EXPECT_EQ(l.path, "/usr/bin/sh");
  EXPECT_EQ(l.record->kind, FileKind::kSymlink);
}

TEST(Resolve, ReportsMissingLoopAndNotDirectory) {
  RootfsBuilder b;
  b.file("/etc/passwd", "x");
  b.symlink("/a", "b").symlink("/b", "a");
  b.symlink("/dangling", "/nowhere");
  auto info = b.info();
  EXPECT_EQ(info.realpath("/a").status, Status::kLoop);
  EXPECT_EQ(info.realpath("/dangling").status, Status::kMissing);
  EXPECT_EQ(info.realpath("/etc/passwd/x").status, Status::kNotDirectory);
  EXPECT_TRUE(info.lstat("/a").ok()) << "lstat does not follow the last component";
}

TEST(Resolve, DotDotIsPhysical) {
  RootfsBuilder b;
  b.dir("/usr/lib/x86_64-linux-gnu").symlink("/lib", "usr/lib");
  b.file("/usr/lib/os-release", "id");
  b.symlink("/usr/lib/x86_64-linux-gnu/up", "../os-release");
  auto info = b.info();
  EXPECT_EQ(info.realpath("/lib/x86_64-linux-gnu/../os-release").path, "/usr/lib/os-release");
  EXPECT_EQ(info.realpath("/lib/x86_64-linux-gnu/up").path, "/usr/lib/os-release");
  EXPECT_EQ(info.realpath("/../../usr/lib").path, "/usr/lib");
}

TEST(Resolve, RefPathIsOneHop) {
  RootfsBuilder b;
  b.exe("/usr/bin/vim.basic");
  b.symlink("/etc/alternatives/vi", "/usr/bin/vim.basic");
  b.symlink("/usr/bin/vi", "/etc/alternatives/vi");
  auto info = b.info();
  EXPECT_EQ(info.ref_path("/usr/bin/vi").path, "/etc/alternatives/vi");
  EXPECT_EQ(info.ref_path("/etc/alternatives/vi").path, "/usr/bin/vim.basic");
}

TEST(DirectoryLinks, ExcludeLinksInsideTheirTarget) {
  RootfsBuilder b;
  b.dir("/usr/bin").symlink("/bin", "usr/bin").symlink("/usr/bin/X11", ".");
  b.symlink("/alt", "/bin");
  auto links = b.info().links_to_directory("/usr/bin");
  std::sort(links.begin(), links.end());
  EXPECT_EQ(links, (std::vector<std::string>{"/alt", "/bin"}));
}

TEST(Commands, CollectsExecutablesAcrossCanonicalDirs) {
  RootfsBuilder b;
  b.symlink("/bin", "usr/bin");
  b.exe("/usr/bin/ls").exe("/usr/local/bin/node");
  b.file("/usr/bin/README", "not a command", 0644);
  b.dir("/usr/bin/subdir");
  b.symlink("/usr/bin/dangling", "/nowhere");
  b.symlink("/usr/bin/nodejs", "/usr/local/bin/node");
  b.exe("/usr/bin/cd");  // a builtin name is never a command
  auto cmds = collect_system_commands(b.info());
  EXPECT_EQ(cmds, (std::vector<std::string>{"ls", "node", "nodejs"}));
  EXPECT_TRUE(is_builtin_command("cd"));
  EXPECT_FALSE(is_builtin_command("ls"));
}

TEST(CommandList, LookupSkipsBrokenCandidatesLikePathSearch) {
  RootfsBuilder b;
  b.exe("/usr/bin/tool");
  b.symlink("/usr/local/bin/tool", "/gone/tool");
  b.file("/usr/sbin/tool", "data", 0644);
  auto info = b.info();
  auto cll = model_commands(info);
  EXPECT_EQ(resolve_chain(cll, "tool"), (std::vector<std::string>{"/usr/bin/tool"}));
}

TEST(CommandList, CyclesAreFlaggedAndRecorded) {
  RootfsBuilder b;
  b.exe("/usr/bin/real");
  b.symlink("/usr/bin/loop", "loop2").symlink("/usr/bin/loop2", "loop");
  auto info = b.info();
  Diagnostics diag;
  auto cll = build_command_linked_list({"loop", "real"}, info, default_search_dirs(), &diag);
  ASSERT_TRUE(cll.contains("loop"));
  bool cyclic = false;
  for (const auto& n : cll.nodes()) cyclic = cyclic || n.cyclic;
  EXPECT_TRUE(cyclic);
  EXPECT_FALSE(cll.cycles().empty());
  EXPECT_GT(diag.warning_count(), 0u);
  EXPECT_EQ(count_commands(cll), 1u);
}

TEST(CommandList, MissingCommandIsSkippedWithAWarning) {
  RootfsBuilder b;
  b.exe("/usr/bin/ls");
  Diagnostics diag;
  auto cll = build_command_linked_list({"ls", "nosuch"}, b.info(), default_search_dirs(), &diag);
  EXPECT_TRUE(cll.contains("ls"));
  EXPECT_FALSE(cll.contains("nosuch"));
  EXPECT_EQ(diag.warning_count(), 1u);
}

TEST(CommandList, AlternativesChainAndAliases) {
  RootfsBuilder b;
  b.symlink("/bin", "usr/bin");
  b.exe("/usr/bin/vim.basic");
  b.symlink("/etc/alternatives/editor", "/usr/bin/vim.basic");
  b.symlink("/usr/bin/editor", "/etc/alternatives/editor");
  auto cll = model_commands(b.info());
  EXPECT_EQ(resolve_chain(cll, "editor"),
            (std::vector<std::string>{"/usr/bin/editor", "/etc/alternatives/editor",
                                      "/usr/bin/vim.basic"}));
  EXPECT_EQ(resolve_chain(cll, "/bin/editor"),
            (std::vector<std::string>{"/bin/editor", "/usr/bin/editor",
                                      "/etc/alternatives/editor", "/usr/bin/vim.basic"}));
  EXPECT_EQ(count_commands(cll), 2u);
}

TEST(CommandList, SymlinkedDirectoryAliasPointsAtTheCanonicalSpelling) {
  RootfsBuilder b;
  b.exe("/opt/node/bin/node");
  b.symlink("/usr/local/bin/node", "/opt/node/bin/node");
  b.symlink("/opt/current", "node");
  auto cll = model_commands(b.info());
  // /opt/current/bin/node is an alias of the real directory.
  ASSERT_TRUE(cll.contains("/opt/current/bin/node"));
  EXPECT_EQ(cll.at("/opt/current/bin/node").next, "/opt/node/bin/node");
}

TEST(CommandList, JsonAndTextForms) {
  auto cll = model_commands(testing::minimal_shell_rootfs().info());
  auto j = cll.to_json();
  EXPECT_EQ(j["nodes"].size(), cll.size());
  EXPECT_NE(cll.to_text().find("sh -> /usr/bin/sh"), std::string::npos);
  EXPECT_THROW(cll.at("nope"), Error);
}

}  // namespace
}  // namespace imgslim
