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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "imgslim/error.hpp"
#include "imgslim/rootfs_model.hpp"

namespace imgslim {

// What the dynamic loader needs to know about an ELF object.
struct ElfInfo {
  bool is_elf = false;
  int elf_class = 0;  // 32 or 64
  bool little_endian = true;
  std::uint16_t machine = 0;
  std::uint16_t type = 0;  // ET_EXEC, ET_DYN, ...
  std::optional<std::string> interpreter;
  std::vector<std::string> needed;
  std::vector<std::string> rpath;
  std::vector<std::string> runpath;
  std::optional<std::string> soname;

  // Linked against shared objects or loaded through an interpreter.
  bool is_dynamic() const { return interpreter.has_value() || !needed.empty(); }
};

// Parses program headers and the dynamic section. Non-ELF input yields
// is_elf == false; ELF input that is truncated or inconsistent throws
// FormatError.
ElfInfo parse_elf(std::string_view bytes);

struct MissingLibrary {
  std::string object;  // path of the object that asked for it
  std::string needed;  // DT_NEEDED entry

  auto operator<=>(const MissingLibrary&) const = default;
};

struct ElfClosure {
  // Every rootfs path the object needs at load time: libraries, the
  // interpreter, and the symlinks traversed to reach them. Excludes the
  // object itself.
  std::set<std::string> paths;
  // Subset of `paths` reached through PT_INTERP.
  std::set<std::string> interpreters;
  std::vector<MissingLibrary> missing;
};

// Static stand-in for `ldd`: resolves DT_NEEDED entries inside a rootfs the
// way the loader would, without executing anything.
class LibraryResolver {
 public:
  explicit LibraryResolver(const FileInfoList& info, Diagnostics* diag = nullptr);

  // Directories searched after rpath/runpath: loader configuration first,
  // then the defaults and their architecture-triplet subdirectories.
  const std::vector<std::string>& configured_dirs() const { return configured_; }
  const std::vector<std::string>& default_dirs() const { return defaults_; }

  // Transitive closure for the object at `path`. Non-ELF and static files
  // give an empty closure.
  ElfClosure closure(std::string_view path);

  // Cached parse of the file at a physical path; nullopt for non-files and
  // non-ELF content.
  const ElfInfo* info_for(const std::string& physical_path);

 private:
  std::optional<std::string> locate(const std::string& needed, const ElfInfo& requester,
                                    const std::string& requester_path,
                                    const ElfInfo& root, ElfClosure& out);
  void load_ld_so_conf(const std::string& conf, int depth);

  const FileInfoList& info_;
  Diagnostics* diag_;
  std::vector<std::string> configured_;
  std::vector<std::string> defaults_;
  std::map<std::string, std::optional<ElfInfo>> cache_;
};

// One-shot convenience wrapper around LibraryResolver::closure().
std::set<std::string> resolve_elf_dependencies(std::string_view binary_path,
                                               const FileInfoList& info,
                                               Diagnostics* diag = nullptr);

}  // namespace imgslim
