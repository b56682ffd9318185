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

#include "imgslim/rootfs_model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "imgslim/path.hpp"

namespace imgslim {

// ---------------------------------------------------------------------------
// FileInfoList

FileInfoList::FileInfoList(std::map<std::string, FileRecord> records)
    : records_(std::move(records)) {
  for (const auto& [path, rec] : records_) {
    if (rec.kind == FileKind::kSymlink && rec.link_target) {
      symlinks_.emplace(path, vpath::join(vpath::parent(path), *rec.link_target));
    }
  }
}

const FileRecord* FileInfoList::find(std::string_view path) const {
  auto it = records_.find(std::string(path));
  return it == records_.end() ? nullptr : &it->second;
}

Resolution FileInfoList::resolve(std::string_view path, bool follow_last) const {
  Resolution r;
  std::deque<std::string> pending;
  for (auto& c : vpath::components(path)) pending.push_back(std::move(c));
  std::string current = "/";
  int hops = 0;

  auto remainder = [&](std::string base) {
    for (const auto& c : pending) base += "/" + c;
    return vpath::normalize(base);
  };

  while (!pending.empty()) {
    std::string c = std::move(pending.front());
    pending.pop_front();
    if (c == ".") continue;
    if (c == "..") {
      current = vpath::parent(current);
      continue;
    }
    std::string candidate = current == "/" ? "/" + c : current + "/" + c;
    const FileRecord* rec = find(candidate);
    if (rec == nullptr) {
      r.status = Resolution::Status::kMissing;
      r.path = remainder(candidate);
      return r;
    }
    r.visited.push_back(candidate);
    bool last = pending.empty();
    if (rec->kind == FileKind::kSymlink && (!last || follow_last)) {
      if (++hops > kMaxSymlinkHops) {
        r.status = Resolution::Status::kLoop;
        r.path = remainder(candidate);
        return r;
      }
      const std::string& target = rec->link_target.value_or("");
      auto parts = vpath::components(target);
      for (auto it = parts.rbegin(); it != parts.rend(); ++it) pending.push_front(*it);
      if (vpath::is_absolute(target)) current = "/";
      continue;
    }
    if (!last && rec->kind != FileKind::kDirectory) {
      r.status = Resolution::Status::kNotDirectory;
      r.path = remainder(candidate);
      return r;
    }
    current = std::move(candidate);
  }
  r.status = Resolution::Status::kOk;
  r.path = current;
  r.record = current == "/" ? nullptr : find(current);
  return r;
}

Resolution FileInfoList::ref_path(std::string_view link_path) const {
  Resolution link = lstat(link_path);
  if (!link.ok() || link.record == nullptr ||
      link.record->kind != FileKind::kSymlink) {
    return link;
  }
  const std::string& target = link.record->link_target.value_or("");
  std::string spelled = vpath::is_absolute(target)
                            ? target
                            : vpath::parent(link.path) + "/" + target;
  return lstat(spelled);
}

std::vector<std::string> FileInfoList::links_to_directory(std::string_view dir) const {
  if (!dir_links_) {
    dir_links_.emplace();
    for (const auto& [link, _] : symlinks_) {
      Resolution r = realpath(link);
      bool is_dir = r.ok() && (r.record == nullptr || r.record->kind == FileKind::kDirectory);
      if (is_dir) (*dir_links_)[r.path].push_back(link);
    }
  }
  Resolution d = realpath(dir);
  if (!d.ok()) return {};
  auto it = dir_links_->find(d.path);
  if (it == dir_links_->end()) return {};
  std::vector<std::string> out;
  for (const auto& link : it->second) {
    if (!vpath::strictly_within(link, d.path)) out.push_back(link);
  }
  return out;
}

std::vector<const FileRecord*> FileInfoList::children(std::string_view dir) const {
  std::string prefix(dir);
  if (prefix != "/") prefix += '/';
  std::vector<const FileRecord*> out;
  for (auto it = records_.lower_bound(prefix);
       it != records_.end() && it->first.starts_with(prefix); ++it) {
    if (it->first.find('/', prefix.size()) == std::string::npos) {
      out.push_back(&it->second);
    }
  }
  return out;
}

FileInfoList scan_rootfs(const FlattenedRootfs& rootfs) {
  return FileInfoList(rootfs.entries);
}

// ---------------------------------------------------------------------------
// System commands

const std::vector<std::string>& default_search_dirs() {
  static const std::vector<std::string> dirs = {
      "/usr/local/sbin", "/usr/local/bin", "/usr/sbin", "/usr/bin", "/sbin", "/bin"};
  return dirs;
}

const std::set<std::string>& builtin_commands() {
  static const std::set<std::string> builtins = {
      ".",      ":",     "alias",  "bg",      "break",  "cd",    "command",
      "continue", "eval", "exec",  "exit",    "export", "fc",    "fg",
      "getopts", "hash", "jobs",   "readonly", "read",  "return", "set",
      "shift",  "times", "trap",   "type",    "ulimit", "umask", "unalias",
      "unset",  "wait",  "local",  "source",
  };
  return builtins;
}

bool is_builtin_command(std::string_view name) {
  return builtin_commands().contains(std::string(name));
}

namespace {

std::vector<std::string> canonical_search_dirs(const FileInfoList& info,
                                               const std::vector<std::string>& dirs) {
  std::vector<std::string> out;
  for (const auto& d : dirs) {
    Resolution r = info.realpath(d);
    bool is_dir = r.ok() && (r.record == nullptr || r.record->kind == FileKind::kDirectory);
    if (is_dir && std::find(out.begin(), out.end(), r.path) == out.end()) {
      out.push_back(r.path);
    }
  }
  return out;
}

bool is_executable_command(const FileInfoList& info, const FileRecord& rec) {
  if (rec.is_file()) return rec.executable();
  if (rec.kind != FileKind::kSymlink) return false;
  Resolution r = info.realpath(rec.path);
  return r.ok() && r.record != nullptr && r.record->is_file() && r.record->executable();
}

}  // namespace

std::vector<std::string> collect_system_commands(const FileInfoList& info,
                                                 const std::vector<std::string>& search_dirs) {
  std::set<std::string> names;
  for (const auto& dir : canonical_search_dirs(info, search_dirs)) {
    for (const FileRecord* rec : info.children(dir)) {
      std::string name = vpath::basename(rec->path);
      if (is_builtin_command(name)) continue;
      if (is_executable_command(info, *rec)) names.insert(std::move(name));
    }
  }
  return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// CommandLinkedList

bool CommandLinkedList::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

const CommandNode* CommandLinkedList::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const CommandNode& CommandLinkedList::at(std::string_view name) const {
  const CommandNode* node = find(name);
  if (node == nullptr) throw NotFoundError("no command node named '" + std::string(name) + "'");
  return *node;
}

CommandNode& CommandLinkedList::get(std::string_view name) {
  return nodes_[index_.at(std::string(name))];
}

CommandNode& CommandLinkedList::append(std::string name) {
  index_.emplace(name, nodes_.size());
  nodes_.push_back(CommandNode{std::move(name), std::nullopt, false, false});
  return nodes_.back();
}

std::vector<std::string> CommandLinkedList::heads() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    if (!n.is_path()) out.push_back(n.name);
  }
  return out;
}

nlohmann::json CommandLinkedList::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json j = {{"name", n.name}, {"head", !n.is_path()}};
    j["next"] = n.next ? nlohmann::json(*n.next) : nlohmann::json(nullptr);
    if (n.dangling) j["dangling"] = true;
    if (n.cyclic) j["cyclic"] = true;
    nodes.push_back(std::move(j));
  }
  return {{"nodes", nodes}, {"cycles", cycles_}};
}

std::string CommandLinkedList::to_text() const {
  std::ostringstream out;
  for (const auto& n : nodes_) {
    out << n.name << " -> " << (n.next ? *n.next : "-");
    if (n.dangling) out << " [dangling]";
    if (n.cyclic) out << " [cyclic]";
    out << '\n';
  }
  return out.str();
}

// Shared machinery for construction and expansion.
class CllBuilder {
 public:
  CllBuilder(CommandLinkedList& cll, const FileInfoList& info, Diagnostics* diag)
      : cll_(cll), info_(info), diag_(diag) {}

  // Links `from` to `target` and keeps resolving one symlink hop at a time
  // until reaching a terminal, an existing node, or a loop.
  void follow(std::string from, std::string target) {
    std::set<std::string> on_path{from};
    while (true) {
      if (on_path.contains(target)) {
        record_cycle(from, target);
        return;
      }
      bool existed = cll_.contains(target);
      if (!existed) cll_.append(target);
      CommandNode& cur = cll_.get(from);
      if (!cur.next) cur.next = target;
      if (existed) return;
      on_path.insert(target);

      Resolution l = info_.lstat(target);
      if (!l.ok()) {
        CommandNode& node = cll_.get(target);
        if (l.status == Resolution::Status::kLoop) {
          node.cyclic = true;
          record_cycle(target, l.path);
        } else {
          node.dangling = true;
          warn(diag_, "rootfs-model", "dangling command path " + target);
        }
        return;
      }
      if (l.record == nullptr || l.record->kind != FileKind::kSymlink) return;
      Resolution ref = info_.ref_path(target);
      if (ref.status == Resolution::Status::kLoop) {
        cll_.get(target).cyclic = true;
        record_cycle(target, ref.path);
        return;
      }
      from = target;
      target = ref.path;
    }
  }

  // Chain construction for a fresh path-named node.
  void build_from_path(const std::string& name) {
    Resolution l = info_.lstat(name);
    if (l.ok() && l.record != nullptr && l.record->kind == FileKind::kSymlink) {
      Resolution ref = info_.ref_path(name);
      if (ref.status == Resolution::Status::kLoop) {
        cll_.get(name).cyclic = true;
        record_cycle(name, ref.path);
        return;
      }
      follow(name, ref.path);
    }
  }

  void append(std::string name) { cll_.append(std::move(name)); }
  void set_next(const std::string& from, const std::string& to) {
    cll_.get(from).next = to;
  }

 private:
  void record_cycle(const std::string& at, const std::string& target) {
    cll_.get(at).cyclic = true;
    std::string msg = "symlink loop: " + at + " -> " + target;
    warn(diag_, "rootfs-model", msg);
    cll_.cycles_.push_back(std::move(msg));
  }

  CommandLinkedList& cll_;
  const FileInfoList& info_;
  Diagnostics* diag_;
};

CommandLinkedList build_command_linked_list(const std::vector<std::string>& commands,
                                            const FileInfoList& info,
                                            const std::vector<std::string>& search_dirs,
                                            Diagnostics* diag) {
  CommandLinkedList cll;
  CllBuilder builder(cll, info, diag);
  auto dirs = canonical_search_dirs(info, search_dirs);
  for (const auto& cmd : commands) {
    if (cmd.empty() || is_builtin_command(cmd) || cll.contains(cmd)) continue;
    // PATH search as execvp does it: dangling, not-a-directory and
    // non-executable candidates are passed over, a symlink loop ends it.
    std::optional<std::string> abs;
    for (const auto& dir : dirs) {
      std::string candidate = vpath::join(dir, cmd);
      const FileRecord* rec = info.find(candidate);
      if (rec == nullptr || rec->kind == FileKind::kDirectory) continue;
      Resolution r = info.realpath(candidate);
      if (r.status == Resolution::Status::kLoop ||
          (r.ok() && r.record != nullptr && is_executable_command(info, *r.record))) {
        abs = candidate;
        break;
      }
    }
    if (!abs) {
      warn(diag, "rootfs-model", "command '" + cmd + "' not found in search directories");
      continue;
    }
    builder.append(cmd);
    builder.follow(cmd, *abs);
  }
  return cll;
}

CommandLinkedList expand_command_linked_list(CommandLinkedList cll,
                                             const FileInfoList& info,
                                             Diagnostics* diag) {
  CllBuilder builder(cll, info, diag);
  // Appended nodes are visited too, so aliases of aliases are covered.
  for (std::size_t i = 0; i < cll.nodes().size(); ++i) {
    if (!cll.nodes()[i].is_path()) continue;
    const std::string name = cll.nodes()[i].name;
    for (const auto& dir : vpath::ancestors(name)) {
      Resolution d = info.lstat(dir);
      if (!d.ok() || d.record == nullptr) continue;

      // (alias, dir itself is the symlink)
      std::vector<std::pair<std::string, bool>> aliases;
      if (d.record->kind == FileKind::kSymlink) {
        Resolution ref = info.ref_path(dir);
        if (ref.ok()) aliases.emplace_back(vpath::replace_prefix(name, dir, ref.path), true);
      } else if (d.record->kind == FileKind::kDirectory) {
        for (const auto& link : info.links_to_directory(dir)) {
          aliases.emplace_back(vpath::replace_prefix(name, dir, link), false);
        }
      }

      for (const auto& [alias, dir_is_link] : aliases) {
        if (!info.lstat(alias).ok() || cll.contains(alias)) continue;
        builder.append(alias);
        builder.build_from_path(alias);
        if (dir_is_link) {
          builder.set_next(name, alias);
        } else {
          builder.set_next(alias, name);
        }
      }
    }
  }
  return cll;
}

CommandLinkedList model_commands(const FileInfoList& info,
                                 const std::vector<std::string>& search_dirs,
                                 Diagnostics* diag) {
  auto commands = collect_system_commands(info, search_dirs);
  return expand_command_linked_list(
      build_command_linked_list(commands, info, search_dirs, diag), info, diag);
}

std::vector<std::string> resolve_chain(const CommandLinkedList& cll, std::string_view start) {
  const CommandNode* node = &cll.at(start);
  std::vector<std::string> out;
  std::set<std::string> seen;
  while (node != nullptr && seen.insert(node->name).second) {
    if (node->is_path()) out.push_back(node->name);
    node = node->next ? cll.find(*node->next) : nullptr;
  }
  return out;
}

std::size_t count_commands(const CommandLinkedList& cll) {
  std::size_t count = 0;
  for (const auto& node : cll.nodes()) {
    if (node.is_path()) continue;
    const CommandNode* cur = &node;
    std::set<std::string> seen;
    while (cur->next && seen.insert(cur->name).second) {
      const CommandNode* nxt = cll.find(*cur->next);
      if (nxt == nullptr) break;
      cur = nxt;
    }
    if (cur->is_path() && !cur->dangling && !cur->cyclic) ++count;
  }
  return count;
}

}  // namespace imgslim
