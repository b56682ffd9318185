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

#include <filesystem>
#include <string>
#include <vector>

#include "imgslim/error.hpp"
#include "imgslim/js_analyzer.hpp"
#include "imgslim/tokens.hpp"

namespace imgslim {

struct PackageRef {
  std::string name;
  std::string version;
  std::filesystem::path root_dir;
  // Script sources of the package itself, nested node_modules excluded.
  std::vector<std::filesystem::path> source_files;
};

// The project followed by every installed package reachable through
// package.json dependencies, each listed once (breadth-first, names sorted
// per package). Reads the installed node_modules tree only.
// Throws NotFoundError when package.json is missing or when dependencies
// are declared but not installed.
std::vector<PackageRef> enumerate_dependency_chain(const std::filesystem::path& project_dir,
                                                   Diagnostics* diag = nullptr);

// Keeps packages whose sources mention a sink name as a whole word. The
// first entry (the project) is always kept.
std::vector<PackageRef> filter_packages(const std::vector<PackageRef>& packages,
                                        const std::vector<std::string>& sinks = default_sinks(),
                                        Diagnostics* diag = nullptr);

std::vector<TaintPath> analyze_data_dependencies(
    const PackageRef& package, const std::vector<std::string>& sinks = default_sinks(),
    Diagnostics* diag = nullptr);

// *.sh files, docker-entrypoint* files and files with a shell shebang,
// sorted. node_modules is skipped unless `include_dependencies`.
std::vector<std::filesystem::path> find_shell_scripts(const std::filesystem::path& root,
                                                      bool include_dependencies = false);

bool is_shell_shebang(std::string_view content);

// Words of a command string: whitespace and shell separators split,
// quote characters dropped.
std::vector<std::string> split_command_words(std::string_view text);

// Resolved exec arguments plus tokenized shell scripts. Scripts named
// docker-entrypoint* get entrypoint-script provenance.
CommandTokenList extract_command_tokens(const std::vector<TaintPath>& paths,
                                        const std::vector<std::filesystem::path>& shell_files,
                                        Diagnostics* diag = nullptr);

}  // namespace imgslim
