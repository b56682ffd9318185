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

#include "imgslim/path.hpp"

namespace imgslim::vpath {

namespace {

template <typename Fn>
void for_each_segment(std::string_view path, Fn&& fn) {
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    fn(path.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace

std::string normalize(std::string_view path) {
  std::vector<std::string_view> stack;
  for_each_segment(path, [&](std::string_view seg) {
    if (seg.empty() || seg == ".") return;
    if (seg == "..") {
      if (!stack.empty()) stack.pop_back();
      return;
    }
    stack.push_back(seg);
  });
  if (stack.empty()) return "/";
  std::string out;
  for (auto seg : stack) {
    out += '/';
    out += seg;
  }
  return out;
}

std::string join(std::string_view dir, std::string_view rel) {
  if (is_absolute(rel)) return normalize(rel);
  std::string combined(dir);
  combined += '/';
  combined += rel;
  return normalize(combined);
}

std::string parent(std::string_view path) {
  auto pos = path.rfind('/');
  if (pos == std::string_view::npos || pos == 0) return "/";
  return std::string(path.substr(0, pos));
}

std::string basename(std::string_view path) {
  auto pos = path.rfind('/');
  if (pos == std::string_view::npos) return std::string(path);
  return std::string(path.substr(pos + 1));
}

std::vector<std::string> components(std::string_view path) {
  std::vector<std::string> out;
  for_each_segment(path, [&](std::string_view seg) {
    if (!seg.empty()) out.emplace_back(seg);
  });
  return out;
}

std::vector<std::string> ancestors(std::string_view path) {
  std::vector<std::string> out;
  std::string prefix;
  auto parts = components(path);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    prefix += '/';
    prefix += parts[i];
    out.push_back(prefix);
  }
  return out;
}

bool within(std::string_view path, std::string_view dir) {
  if (dir == "/") return is_absolute(path);
  if (path.size() < dir.size() || path.substr(0, dir.size()) != dir) {
    return false;
  }
  return path.size() == dir.size() || path[dir.size()] == '/';
}

bool strictly_within(std::string_view path, std::string_view dir) {
  return path != dir && within(path, dir);
}

std::string replace_prefix(std::string_view path, std::string_view from,
                           std::string_view to) {
  std::string_view rest = path.substr(from == "/" ? 0 : from.size());
  std::string out(to == "/" ? "" : to);
  out += rest;
  return out.empty() ? "/" : out;
}

bool is_absolute(std::string_view path) {
  return !path.empty() && path.front() == '/';
}

}  // namespace imgslim::vpath
