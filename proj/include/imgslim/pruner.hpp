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

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "imgslim/elf.hpp"
#include "imgslim/error.hpp"
#include "imgslim/rootfs_model.hpp"
#include "imgslim/tokens.hpp"

namespace imgslim {

struct MatchResult {
  // Matched node names in CTL order, deduplicated.
  std::vector<std::string> start_nodes;
  // token -> node name. Built-ins map to themselves and have no start node.
  std::map<std::string, std::string> matched;
  std::vector<std::string> builtins;
  std::vector<std::string> unmatched;
};

// Exact-text match of every token against the node names.
MatchResult match_tokens(const CommandTokenList& ctl, const CommandLinkedList& cll);

enum class RetainReason {
  kTokenMatch,
  kElfDependency,
  kInterpreter,
  kNonProtected,
  kParentDirectory,
  // Link target or directory symlink traversed to reach a retained path.
  kLinkTarget,
};

std::string_view to_string(RetainReason reason);

struct RetainList {
  std::set<std::string> paths;
  // First reason recorded for each path.
  std::map<std::string, RetainReason> reasons;
  // Needed libraries of retained objects that the rootfs does not provide.
  std::vector<MissingLibrary> missing_libraries;

  bool contains(std::string_view path) const { return paths.count(std::string(path)) != 0; }
  // Returns true when the path was not yet present.
  bool add(const std::string& path, RetainReason reason);

  nlohmann::json to_json() const;
};

const std::vector<std::string>& default_protected_substrings();

struct PruneOptions {
  // Paths containing any of these are subject to pruning.
  std::vector<std::string> protected_substrings = default_protected_substrings();
  // Keep everything (pruning disabled).
  bool conservative = false;
  // Extra files to retain like start nodes, e.g. an absolute entrypoint.
  std::vector<std::string> entry_paths;
};

bool is_protected(std::string_view path, const std::vector<std::string>& substrings);

RetainList build_retain_list(const std::vector<std::string>& start_nodes,
                             const CommandLinkedList& cll, const FileInfoList& info,
                             const PruneOptions& options = {}, Diagnostics* diag = nullptr);

// Records of the retained paths. Throws ConsistencyError when a retained
// path is absent from the rootfs.
std::map<std::string, FileRecord> retained_records(const FileInfoList& info,
                                                   const RetainList& retain);

// Tar stream of exactly the retained entries, sorted by path.
std::string emit_slim_rootfs(const FileInfoList& info, const RetainList& retain);

struct PruneReport {
  std::map<std::string, std::string> matched_tokens;
  std::vector<std::string> builtin_tokens;
  std::vector<std::string> unmatched_tokens;
  std::size_t retained_count = 0;
  std::size_t removed_count = 0;
  std::uint64_t original_size = 0;
  std::uint64_t slim_size = 0;
  double slimming_ratio = 0.0;
  std::size_t commands_before = 0;
  std::size_t commands_after = 0;
  std::vector<MissingLibrary> missing_libraries;
  std::vector<std::string> cycles;

  nlohmann::json to_json() const;
  // Original size, size after slimming and ratio as an aligned table.
  std::string to_table() const;
};

// Sizes count regular-file content bytes. Command counts use
// count_commands() on the two lists.
PruneReport compute_report(const FileInfoList& before, const CommandLinkedList& cll_before,
                           const RetainList& retain, const CommandLinkedList& cll_after,
                           const MatchResult& match);

std::string format_size(std::uint64_t bytes);

}  // namespace imgslim
