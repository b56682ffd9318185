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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "imgslim/error.hpp"
#include "imgslim/image.hpp"
#include "imgslim/js_analyzer.hpp"
#include "imgslim/packages.hpp"
#include "imgslim/pruner.hpp"
#include "imgslim/rootfs_model.hpp"
#include "imgslim/tokens.hpp"

namespace imgslim {

struct AnalysisOptions {
  std::vector<std::string> sinks = default_sinks();
  // Also tokenize shell scripts inside installed dependencies.
  bool include_dependency_scripts = false;
};

struct AnalysisResult {
  std::vector<PackageRef> packages;
  std::vector<PackageRef> filtered;
  std::vector<TaintPath> paths;
  std::vector<std::filesystem::path> shell_files;
  CommandTokenList ctl;

  nlohmann::json to_json() const;
};

// Dependency chain, package filter, per-package analysis (in parallel,
// merged in chain order) and token extraction.
AnalysisResult analyze_project(const std::filesystem::path& project_dir,
                               const AnalysisOptions& options = {},
                               Diagnostics* diag = nullptr);

enum class UnresolvedPolicy {
  kWarn,
  // Unresolved sinks abort slimming with AnalysisError.
  kStrict,
  // Pruning disabled; the slim rootfs equals the fat one.
  kConservative,
};

struct SlimOptions {
  std::vector<std::string> search_dirs = default_search_dirs();
  UnresolvedPolicy policy = UnresolvedPolicy::kWarn;
  std::vector<std::string> protected_substrings = default_protected_substrings();
  BuildOptions build;
  // Feed Entrypoint/Cmd words and entrypoint scripts into the CTL.
  bool use_image_config = true;
};

struct RootfsSlimResult {
  CommandTokenList ctl;  // input CTL plus image-config tokens
  CommandLinkedList cll;
  CommandLinkedList cll_after;
  MatchResult match;
  RetainList retain;
  std::string rootfs_tar;
  PruneReport report;
};

// Adds Entrypoint/Cmd words, entrypoint shell scripts and
// docker-entrypoint* scripts found in the rootfs to `ctl`.
void add_image_config_tokens(CommandTokenList& ctl, const ImageMetadata& metadata,
                             const FileInfoList& info, const CommandLinkedList& cll);

RootfsSlimResult slim_rootfs(const FileInfoList& info, CommandTokenList ctl,
                             const ImageMetadata& metadata, const SlimOptions& options = {},
                             Diagnostics* diag = nullptr);

struct SlimResult {
  RootfsSlimResult rootfs;
  ImageArchive archive;
};

SlimResult slim_image(const LoadedImage& image, CommandTokenList ctl,
                      const SlimOptions& options = {}, Diagnostics* diag = nullptr);

struct InspectResult {
  ImageMetadata metadata;
  ImageLayout layout = ImageLayout::kOci;
  std::size_t layer_count = 0;
  std::uint64_t archive_size = 0;
  std::uint64_t rootfs_size = 0;
  std::size_t entry_count = 0;
  std::size_t command_count = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

InspectResult inspect_image(const LoadedImage& image, std::uint64_t archive_size = 0,
                            const std::vector<std::string>& search_dirs = default_search_dirs(),
                            Diagnostics* diag = nullptr);

// Recorded directory listing, one entry per line:
//   d 0755 /usr/bin
//   f 0755 /usr/bin/dash [size]
//   l 0777 /bin/sh -> dash
//   h 0755 /usr/bin/x => /usr/bin/y
// Blank lines and '#' comments are ignored. Throws FormatError.
FileInfoList parse_listing(std::string_view text);
std::string format_listing(const FileInfoList& info);

nlohmann::json metadata_to_json(const ImageMetadata& metadata);

}  // namespace imgslim
