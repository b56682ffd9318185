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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imgslim {

enum class FileKind { kRegular, kDirectory, kSymlink, kHardlink, kDevice, kFifo };

std::string_view to_string(FileKind kind);

// A slice of a layer buffer. Records share the layer bytes instead of copying
// file content.
struct Blob {
  std::shared_ptr<const std::string> owner;
  std::size_t offset = 0;
  std::size_t size = 0;

  std::string_view view() const {
    if (!owner) return {};
    return std::string_view(*owner).substr(offset, size);
  }
};

struct FileRecord {
  // Absolute, normalized path inside the rootfs. Never "/".
  std::string path;
  FileKind kind = FileKind::kRegular;
  std::uint32_t mode = 0644;
  std::uint64_t size = 0;
  // Raw symlink target as stored (may be relative), or the absolute path of
  // the hard link target. Present iff kind is a link kind.
  std::optional<std::string> link_target;

  std::uint64_t uid = 0;
  std::uint64_t gid = 0;
  std::int64_t mtime = 0;
  std::string uname;
  std::string gname;
  // '3' (character) or '4' (block) for devices.
  char device_type = 0;
  std::uint32_t devmajor = 0;
  std::uint32_t devminor = 0;
  std::map<std::string, std::string> extra_pax;

  // Content of regular files; hard links carry their target's content.
  Blob content;

  bool is_link() const {
    return kind == FileKind::kSymlink || kind == FileKind::kHardlink;
  }
  bool is_file() const {
    return kind == FileKind::kRegular || kind == FileKind::kHardlink;
  }
  bool executable() const { return (mode & 0111) != 0; }
};

// The root filesystem obtained by applying every layer in order. The root
// directory itself is implicit and never stored.
struct FlattenedRootfs {
  std::map<std::string, FileRecord> entries;
  // Members that were skipped while flattening (unknown tar types, aufs
  // metadata), "layer N: name (reason)".
  std::vector<std::string> skipped;

  // Bytes of regular-file content; hard links are not counted twice.
  std::uint64_t total_size() const;
};

// Sum of regular-file content sizes over the given records.
std::uint64_t content_size(const std::map<std::string, FileRecord>& records);

// Serializes `records` into a deterministic tar stream: entries sorted by
// path, metadata preserved, hard links placed after their targets.
std::string write_rootfs_tar(const std::map<std::string, FileRecord>& records);

}  // namespace imgslim
