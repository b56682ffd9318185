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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "imgslim/error.hpp"
#include "imgslim/rootfs.hpp"

namespace imgslim {

// Kernel limit on symlinks followed during one path lookup (MAXSYMLINKS).
inline constexpr int kMaxSymlinkHops = 40;

// Outcome of walking a path inside the virtual root.
struct Resolution {
  enum class Status { kOk, kMissing, kLoop, kNotDirectory };

  Status status = Status::kMissing;
  // Physical path reached. For kMissing this is the physical prefix that
  // exists joined with the unresolved remainder.
  std::string path;
  const FileRecord* record = nullptr;
  // Every entry touched on the way, in order: directories walked through,
  // each symlink followed, and the final entry.
  std::vector<std::string> visited;

  bool ok() const { return status == Status::kOk; }
};

// The scanned rootfs inventory plus symlink-aware lookups.
class FileInfoList {
 public:
  FileInfoList() = default;
  explicit FileInfoList(std::map<std::string, FileRecord> records);

  const std::map<std::string, FileRecord>& records() const { return records_; }
  // Symlink path -> absolute target (relative targets joined onto the
  // link's directory).
  const std::map<std::string, std::string>& symlink_table() const { return symlinks_; }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Exact lookup by physical path.
  const FileRecord* find(std::string_view path) const;

  // Path walk with kernel semantics: intermediate symlinks are always
  // followed; the last component only when `follow_last`.
  Resolution resolve(std::string_view path, bool follow_last) const;
  Resolution lstat(std::string_view path) const { return resolve(path, false); }
  Resolution realpath(std::string_view path) const { return resolve(path, true); }

  // One step of symlink resolution for the link spelled `link_path`: its
  // target joined onto the link's directory with directories resolved
  // physically, last component not followed. Returns the resolution of that
  // spelling (kMissing for dangling links).
  Resolution ref_path(std::string_view link_path) const;

  // Directory symlinks whose full resolution is the same directory as
  // `dir`, sorted. Links located inside that directory are excluded.
  std::vector<std::string> links_to_directory(std::string_view dir) const;

  // Direct children of a physical directory path.
  std::vector<const FileRecord*> children(std::string_view dir) const;

 private:
  std::map<std::string, FileRecord> records_;
  std::map<std::string, std::string> symlinks_;
  // realpath(directory symlink) -> links, built on first use.
  mutable std::optional<std::map<std::string, std::vector<std::string>>> dir_links_;
};

FileInfoList scan_rootfs(const FlattenedRootfs& rootfs);

// Default command search directories, in lookup precedence order.
const std::vector<std::string>& default_search_dirs();

// POSIX shell built-ins that never need a binary in the image.
bool is_builtin_command(std::string_view name);
const std::set<std::string>& builtin_commands();

// Basenames of executables directly inside the search directories,
// built-ins excluded, deduplicated and sorted. A symlink counts when it
// resolves to an executable file.
std::vector<std::string> collect_system_commands(
    const FileInfoList& info,
    const std::vector<std::string>& search_dirs = default_search_dirs());

struct CommandNode {
  std::string name;
  std::optional<std::string> next;
  // Chain ends because the target does not exist inside the rootfs.
  bool dangling = false;
  // Chain truncated at a symlink loop.
  bool cyclic = false;

  bool is_path() const { return !name.empty() && name.front() == '/'; }
};

class CommandLinkedList {
 public:
  bool contains(std::string_view name) const;
  const CommandNode* find(std::string_view name) const;
  const CommandNode& at(std::string_view name) const;

  // Insertion-ordered nodes.
  const std::vector<CommandNode>& nodes() const { return nodes_; }
  // Bare command-name nodes, in insertion order.
  std::vector<std::string> heads() const;
  // Human-readable descriptions of symlink loops met while building.
  const std::vector<std::string>& cycles() const { return cycles_; }

  std::size_t size() const { return nodes_.size(); }

  nlohmann::json to_json() const;
  // "name -> next [flags]" per line, in insertion order.
  std::string to_text() const;

 private:
  friend class CllBuilder;

  CommandNode& get(std::string_view name);
  CommandNode& append(std::string name);

  std::vector<CommandNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> cycles_;
};

// Command linked list construction: for every command, a head node named by
// the command followed by one node per symlink resolution step.
CommandLinkedList build_command_linked_list(
    const std::vector<std::string>& commands, const FileInfoList& info,
    const std::vector<std::string>& search_dirs = default_search_dirs(),
    Diagnostics* diag = nullptr);

// Adds the alias spellings created by directory symlinks (/bin/sh for
// /usr/bin/sh when /bin -> /usr/bin) and links them into the chains.
CommandLinkedList expand_command_linked_list(CommandLinkedList cll,
                                             const FileInfoList& info,
                                             Diagnostics* diag = nullptr);

// collect + build + expand.
CommandLinkedList model_commands(
    const FileInfoList& info,
    const std::vector<std::string>& search_dirs = default_search_dirs(),
    Diagnostics* diag = nullptr);

// Paths of `start` and every node after it; bare names are omitted.
// Throws NotFoundError for an unknown start.
std::vector<std::string> resolve_chain(const CommandLinkedList& cll,
                                       std::string_view start);

// Heads whose chain ends at an existing, loop-free file.
std::size_t count_commands(const CommandLinkedList& cll);

}  // namespace imgslim
