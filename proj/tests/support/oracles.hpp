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


// Reference implementations used to check the library. They share no code
// with the code under test beyond plain data types.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "imgslim/rootfs.hpp"
#include "imgslim/tar.hpp"

namespace imgslim::testing::oracle {

using Records = std::map<std::string, FileRecord>;

struct Resolved {
  enum Status { kOk, kMissing, kLoop, kNotDir };
  Status status = kMissing;
  std::string path;                  // physical path when ok
  std::vector<std::string> visited;  // every existing entry looked at
  bool ok() const { return status == kOk; }
};

// Component-by-component resolution with a recursive walk of each link
// target and a 40 hop budget.
Resolved resolve(const Records& records, const std::string& path, bool follow_last = true);

// Writes the records into a real directory tree (files, dirs, symlinks).
void materialize(const Records& records, const std::filesystem::path& root);

// Kernel resolution confined to `root`. Returns nullopt with `err` set on
// failure, or when the kernel lacks support (err = ENOSYS).
std::optional<std::string> kernel_realpath(const std::filesystem::path& root,
                                           const std::string& path, int* err);

// Search dirs after resolution, duplicates and non-directories dropped.
std::vector<std::string> canonical_dirs(const Records& records,
                                        const std::vector<std::string>& dirs);

// Names in the search dirs that lead to an executable file.
std::set<std::string> system_commands(const Records& records,
                                      const std::vector<std::string>& dirs);

// Where a PATH search for `name` stops: the first candidate that is an
// executable file after resolution, or a symlink loop.
std::optional<std::string> command_path(const Records& records,
                                        const std::vector<std::string>& canonical,
                                        const std::string& name);

// Commands whose looked-up path resolves.
std::size_t count_commands(const Records& records, const std::vector<std::string>& dirs);

bool protected_path(const std::string& path);

// Reads the `<kind> <mode> <path> ...` listing format; parents that are not
// listed become 0755 directories.
Records read_listing(const std::string& text);

// ---------------------------------------------------------------------------
// Dynamic linking ground truth

struct ElfWorld {
  RootfsBuilder rootfs;
  std::map<std::string, ElfSpec> specs;  // by the path the bytes were written to
  std::vector<std::string> conf_dirs;    // what /etc/ld.so.conf lists
  void add_elf(const std::string& path, const ElfSpec& spec, std::uint32_t mode = 0755,
               const std::string& padding = {});
};

struct Closure {
  std::set<std::string> paths;
  std::set<std::pair<std::string, std::string>> missing;  // (object, needed)
};

Closure elf_closure(const ElfWorld& world, const std::string& binary);

// ---------------------------------------------------------------------------
// Layer application on a real filesystem

struct LayerEntry {
  tar::Header header;
  std::string data;
};
using Layer = std::vector<LayerEntry>;

struct FsEntry {
  FileKind kind = FileKind::kRegular;
  std::uint32_t mode = 0;
  std::string content;
  std::string target;
  bool operator==(const FsEntry&) const = default;
};

// Applies the layers one by one in `scratch` and reads the tree back.
std::map<std::string, FsEntry> apply_layers(const std::vector<Layer>& layers,
                                             const std::filesystem::path& scratch);

std::map<std::string, FsEntry> project(const Records& records);

}  // namespace imgslim::testing::oracle
