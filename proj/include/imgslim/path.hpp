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

#include <string>
#include <string_view>
#include <vector>

// Lexical helpers for absolute paths inside a virtual root filesystem.
// Nothing here touches the host filesystem.
namespace imgslim::vpath {

// Makes `path` absolute and removes "", "." and ".." segments. ".." at the
// root stays at the root, which is how the kernel treats it after chroot.
std::string normalize(std::string_view path);

// Joins `rel` onto `dir`; an absolute `rel` replaces `dir` entirely.
std::string join(std::string_view dir, std::string_view rel);

// Parent of a normalized path; the parent of "/" is "/".
std::string parent(std::string_view path);

std::string basename(std::string_view path);

std::vector<std::string> components(std::string_view path);

// Proper ancestors of `path`, excluding "/", ordered top-down:
// "/usr/bin/sh" -> {"/usr", "/usr/bin"}.
std::vector<std::string> ancestors(std::string_view path);

// True when `path` equals `dir` or lies below it.
bool within(std::string_view path, std::string_view dir);

// True when `path` lies strictly below `dir`.
bool strictly_within(std::string_view path, std::string_view dir);

// Replaces the leading directory `from` of `path` with `to`. `path` must be
// within `from`.
std::string replace_prefix(std::string_view path, std::string_view from,
                           std::string_view to);

bool is_absolute(std::string_view path);

}  // namespace imgslim::vpath
