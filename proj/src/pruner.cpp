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


#include "imgslim/pruner.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>

#include "imgslim/path.hpp"

namespace imgslim {

MatchResult match_tokens(const CommandTokenList& ctl, const CommandLinkedList& cll) {
  MatchResult m;
  for (const auto& t : ctl.tokens()) {
    const std::string& text = t.token;
    if (cll.contains(text)) {
      m.matched.emplace(text, text);
      if (std::find(m.start_nodes.begin(), m.start_nodes.end(), text) == m.start_nodes.end()) {
        m.start_nodes.push_back(text);
      }
    } else if (is_builtin_command(text)) {
      m.matched.emplace(text, text);
      m.builtins.push_back(text);
    } else {
      m.unmatched.push_back(text);
    }
  }
  return m;
}

std::string_view to_string(RetainReason reason) {
  switch (reason) {
    case RetainReason::kTokenMatch:
      return "token-match";
    case RetainReason::kElfDependency:
      return "elf-dependency";
    case RetainReason::kInterpreter:
      return "interpreter";
    case RetainReason::kNonProtected:
      return "non-protected";
    case RetainReason::kParentDirectory:
      return "parent-directory";
    case RetainReason::kLinkTarget:
      return "link-target";
  }
  return "non-protected";
}

bool RetainList::add(const std::string& path, RetainReason reason) {
  if (!paths.insert(path).second) return false;
  reasons.emplace(path, reason);
  return true;
}

nlohmann::json RetainList::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : paths) {
    entries.push_back({{"path", p}, {"reason", to_string(reasons.at(p))}});
  }
  nlohmann::json missing = nlohmann::json::array();
  for (const auto& m : missing_libraries) {
    missing.push_back({{"object", m.object}, {"needed", m.needed}});
  }
  return {{"paths", entries}, {"missing_libraries", missing}};
}

const std::vector<std::string>& default_protected_substrings() {
  static const std::vector<std::string> kDefault = {"/bin/", "/sbin/", "/lib/"};
  return kDefault;
}

bool is_protected(std::string_view path, const std::vector<std::string>& substrings) {
  return std::any_of(substrings.begin(), substrings.end(), [&](const std::string& s) {
    return path.find(s) != std::string_view::npos;
  });
}

namespace {

// Words of a "#!" line, or empty when the content has none.
std::vector<std::string> shebang_words(std::string_view content) {
  if (!content.starts_with("#!")) return {};
  auto end = content.find('\n');
  std::string_view line = content.substr(2, end == std::string_view::npos ? content.size() - 2
                                                                          : end - 2);
  if (line.size() > 256) line = line.substr(0, 256);
  return split_whitespace(line);
}

class RetainBuilder {
 public:
  RetainBuilder(const CommandLinkedList& cll, const FileInfoList& info, Diagnostics* diag)
      : cll_(cll), info_(info), resolver_(info, diag) {}

  void keep(const std::string& path, RetainReason reason) {
    if (path == "/" || info_.find(path) == nullptr) return;
    if (out_.add(path, reason)) queue_.push_back(path);
  }

  void keep_chain(const std::string& node, RetainReason reason) {
    for (const auto& p : resolve_chain(cll_, node)) keep(p, reason);
  }

  void close() {
    while (!queue_.empty()) {
      std::string path = queue_.front();
      queue_.pop_front();
      visit(path);
    }
    std::sort(out_.missing_libraries.begin(), out_.missing_libraries.end());
    out_.missing_libraries.erase(
        std::unique(out_.missing_libraries.begin(), out_.missing_libraries.end()),
        out_.missing_libraries.end());
  }

  RetainList take() { return std::move(out_); }

 private:
  void visit(const std::string& path) {
    for (const auto& a : vpath::ancestors(path)) keep(a, RetainReason::kParentDirectory);
    const FileRecord* rec = info_.find(path);
    if (rec == nullptr) return;

    if (rec->kind == FileKind::kSymlink) {
      Resolution r = info_.realpath(path);
      for (const auto& v : r.visited) keep(v, RetainReason::kLinkTarget);
      return;
    }
    if (rec->kind == FileKind::kHardlink && rec->link_target) {
      keep(*rec->link_target, RetainReason::kLinkTarget);
    }
    if (!rec->is_file()) return;

    ElfClosure closure = resolver_.closure(path);
    for (const auto& p : closure.paths) {
      keep(p, closure.interpreters.count(p) ? RetainReason::kInterpreter
                                            : RetainReason::kElfDependency);
    }
    out_.missing_libraries.insert(out_.missing_libraries.end(), closure.missing.begin(),
                                  closure.missing.end());
    visit_shebang(*rec);
  }

  void visit_shebang(const FileRecord& rec) {
    auto words = shebang_words(rec.content.view());
    if (words.empty()) return;
    Resolution r = info_.realpath(words[0]);
    for (const auto& v : r.visited) keep(v, RetainReason::kInterpreter);
    if (vpath::basename(words[0]) != "env") return;
    for (std::size_t i = 1; i < words.size(); ++i) {
      if (words[i].starts_with("-") || words[i].find('=') != std::string::npos) continue;
      if (cll_.contains(words[i])) keep_chain(words[i], RetainReason::kInterpreter);
      break;
    }
  }

  const CommandLinkedList& cll_;
  const FileInfoList& info_;
  LibraryResolver resolver_;
  RetainList out_;
  std::deque<std::string> queue_;
};

}  // namespace

RetainList build_retain_list(const std::vector<std::string>& start_nodes,
                             const CommandLinkedList& cll, const FileInfoList& info,
                             const PruneOptions& options, Diagnostics* diag) {
  RetainBuilder builder(cll, info, diag);
  for (const auto& node : start_nodes) {
    if (cll.contains(node)) builder.keep_chain(node, RetainReason::kTokenMatch);
  }
  for (const auto& p : options.entry_paths) {
    Resolution r = info.realpath(p);
    for (const auto& v : r.visited) builder.keep(v, RetainReason::kTokenMatch);
  }
  for (const auto& [path, rec] : info.records()) {
    if (options.conservative || !is_protected(path, options.protected_substrings)) {
      builder.keep(path, RetainReason::kNonProtected);
    }
  }
  builder.close();
  return builder.take();
}

std::map<std::string, FileRecord> retained_records(const FileInfoList& info,
                                                   const RetainList& retain) {
  std::map<std::string, FileRecord> out;
  for (const auto& p : retain.paths) {
    const FileRecord* rec = info.find(p);
    if (rec == nullptr) {
      throw ConsistencyError("retain list references a path missing from the rootfs: " + p);
    }
    out.emplace(p, *rec);
  }
  return out;
}

std::string emit_slim_rootfs(const FileInfoList& info, const RetainList& retain) {
  return write_rootfs_tar(retained_records(info, retain));
}

PruneReport compute_report(const FileInfoList& before, const CommandLinkedList& cll_before,
                           const RetainList& retain, const CommandLinkedList& cll_after,
                           const MatchResult& match) {
  PruneReport r;
  r.matched_tokens = match.matched;
  r.builtin_tokens = match.builtins;
  r.unmatched_tokens = match.unmatched;
  r.retained_count = retain.paths.size();
  r.removed_count = before.size() - std::min(before.size(), retain.paths.size());
  r.original_size = content_size(before.records());
  std::map<std::string, FileRecord> kept;
  for (const auto& p : retain.paths) {
    if (const FileRecord* rec = before.find(p)) kept.emplace(p, *rec);
  }
  r.slim_size = content_size(kept);
  r.slimming_ratio = r.original_size == 0
                         ? 0.0
                         : 1.0 - static_cast<double>(r.slim_size) /
                                     static_cast<double>(r.original_size);
  r.commands_before = count_commands(cll_before);
  r.commands_after = count_commands(cll_after);
  r.missing_libraries = retain.missing_libraries;
  r.cycles = cll_before.cycles();
  return r;
}

nlohmann::json PruneReport::to_json() const {
  nlohmann::json missing = nlohmann::json::array();
  for (const auto& m : missing_libraries) {
    missing.push_back({{"object", m.object}, {"needed", m.needed}});
  }
  return {{"matched_tokens", matched_tokens},
          {"builtin_tokens", builtin_tokens},
          {"unmatched_tokens", unmatched_tokens},
          {"retained_count", retained_count},
          {"removed_count", removed_count},
          {"original_size", original_size},
          {"slim_size", slim_size},
          {"slimming_ratio", slimming_ratio},
          {"commands_before", commands_before},
          {"commands_after", commands_after},
          {"missing_libraries", missing},
          {"cycles", cycles}};
}

std::string format_size(std::uint64_t bytes) {
  static const char* kUnits[] = {"B", "kB", "MB", "GB", "TB"};
  double v = static_cast<double>(bytes);
  int unit = 0;
  while (v >= 1000.0 && unit < 4) {
    v /= 1000.0;
    ++unit;
  }
  char buf[32];
  if (unit == 0) {
    std::snprintf(buf, sizeof buf, "%llu B", static_cast<unsigned long long>(bytes));
  } else {
    std::snprintf(buf, sizeof buf, "%.2f %s", v, kUnits[unit]);
  }
  return buf;
}

std::string PruneReport::to_table() const {
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.2f%%", slimming_ratio * 100.0);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-15s | %-19s | %-14s\n"
                "%.15s-+-%.19s-+-%.14s\n"
                "%15s | %19s | %14s\n"
                "commands: %zu -> %zu, entries retained: %zu, removed: %zu\n",
                "Original Size", "Size After Slimming", "Slimming Ratio",
                "--------------------", "--------------------", "--------------------",
                format_size(original_size).c_str(), format_size(slim_size).c_str(), ratio,
                commands_before, commands_after, retained_count, removed_count);
  return buf;
}

}  // namespace imgslim
