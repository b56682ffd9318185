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
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "imgslim/image.hpp"
#include "imgslim/rootfs.hpp"
#include "imgslim/rootfs_model.hpp"
#include "imgslim/tar.hpp"

namespace imgslim::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& content);

// In-memory rootfs. Missing parent directories are added as 0755 dirs.
class RootfsBuilder {
 public:
  RootfsBuilder& dir(const std::string& path, std::uint32_t mode = 0755);
  RootfsBuilder& file(const std::string& path, const std::string& content,
                      std::uint32_t mode = 0644);
  RootfsBuilder& exe(const std::string& path, const std::string& content = "\x7f" "ELF-stub");
  RootfsBuilder& symlink(const std::string& path, const std::string& target);
  RootfsBuilder& hardlink(const std::string& path, const std::string& target);
  RootfsBuilder& remove(const std::string& path);

  bool has(const std::string& path) const { return records_.count(path) != 0; }
  const std::map<std::string, FileRecord>& records() const { return records_; }
  FileInfoList info() const { return FileInfoList(records_); }
  std::string tar() const { return write_rootfs_tar(records_); }

 private:
  void parents(const std::string& path);
  std::map<std::string, FileRecord> records_;
};

// Synthetic ELF object description.
struct ElfSpec {
  int elf_class = 64;
  std::uint16_t machine = 62;  // x86-64
  bool little_endian = true;
  std::uint16_t type = 3;      // ET_DYN
  std::optional<std::string> interpreter;
  std::vector<std::string> needed;
  std::vector<std::string> rpath;
  std::vector<std::string> runpath;
  std::optional<std::string> soname;
  // Place the dynamic string table outside every PT_LOAD so only the
  // section headers can locate it.
  bool strtab_via_sections = false;
};

std::string build_elf(const ElfSpec& spec);

// Multi-layer image archive written without the library's image writer.
struct ImageFixture {
  std::vector<std::string> layer_tars;
  ImageMetadata metadata;
  ImageLayout layout = ImageLayout::kOci;
  bool gzip = false;
};

std::string build_image_archive(const ImageFixture& fixture);

// Layer tar entry helpers.
tar::Header dir_header(const std::string& name, std::uint32_t mode = 0755);
tar::Header file_header(const std::string& name, std::size_t size, std::uint32_t mode = 0644);
tar::Header symlink_header(const std::string& name, const std::string& target);
tar::Header hardlink_header(const std::string& name, const std::string& target);

// sh -> /usr/bin/sh -> /usr/bin/dash with /bin -> usr/bin (merged /usr),
// dash linked against libc, plus unrelated commands and runtime files.
// Only dash, sh and the /bin link.
RootfsBuilder minimal_shell_rootfs();
RootfsBuilder sample_rootfs();
ImageMetadata sample_metadata();

// Writes `files` (relative path -> content) under `root`.
void write_tree(const std::filesystem::path& root,
                const std::map<std::string, std::string>& files);

// A project with a JSON manifest and installed node_modules.
struct PackageFixture {
  std::string name;
  std::vector<std::string> deps;
  std::map<std::string, std::string> files;  // relative to the package dir
};

// Installs `packages` flat under <root>/node_modules and writes the root
// manifest depending on `root_deps`.
void write_npm_project(const std::filesystem::path& root, const std::string& name,
                       const std::vector<std::string>& root_deps,
                       const std::map<std::string, std::string>& root_files,
                       const std::vector<PackageFixture>& packages);

}  // namespace imgslim::testing
