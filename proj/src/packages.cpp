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


#include "imgslim/packages.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imgslim/shell_tokenizer.hpp"

namespace imgslim {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

bool is_script_source(const fs::path& p) {
  auto ext = p.extension().string();
  return ext == ".js" || ext == ".mjs" || ext == ".cjs";
}

// Regular files under `root`, sorted; node_modules and .git skipped unless
// node_modules is explicitly allowed.
std::vector<fs::path> walk(const fs::path& root, bool into_node_modules) {
  std::vector<fs::path> out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  for (; !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    const auto name = it->path().filename().string();
    if (it->is_directory(ec)) {
      if (name == ".git" || (name == "node_modules" && !into_node_modules)) {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (it->is_regular_file(ec)) out.push_back(it->path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Manifest {
  std::string name;
  std::string version;
  std::vector<std::string> deps;
  std::set<std::string> optional;
};

Manifest read_manifest(const fs::path& dir, bool is_root) {
  auto text = slurp(dir / "package.json");
  if (!text) throw NotFoundError("no package.json in " + dir.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / "package.json").string() + ": " + e.what());
  }
  Manifest m;
  m.name = j.value("name", dir.filename().string());
  m.version = j.value("version", "");
  std::set<std::string> names;
  std::vector<std::string> fields = {"dependencies", "optionalDependencies"};
  if (is_root) fields.push_back("devDependencies");
  for (const auto& f : fields) {
    if (!j.contains(f) || !j[f].is_object()) continue;
    for (const auto& [k, v] : j[f].items()) {
      names.insert(k);
      if (f == "optionalDependencies") m.optional.insert(k);
    }
  }
  m.deps.assign(names.begin(), names.end());
  return m;
}

// Node's lookup: node_modules of the package directory and each ancestor,
// bounded by the project root.
std::optional<fs::path> resolve_package(const fs::path& from, const std::string& name,
                                        const fs::path& project) {
  for (fs::path dir = from;; dir = dir.parent_path()) {
    fs::path candidate = dir / "node_modules" / name;
    std::error_code ec;
    if (fs::exists(candidate / "package.json", ec)) return candidate;
    if (dir == project || dir == dir.parent_path()) return std::nullopt;
  }
}

bool whole_word_at(std::string_view text, std::size_t pos, std::size_t len) {
  auto word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '$';
  };
  bool left = pos == 0 || !word(text[pos - 1]);
  bool right = pos + len >= text.size() || !word(text[pos + len]);
  return left && right;
}

bool mentions_sink(std::string_view text, const std::vector<std::string>& sinks) {
  for (const auto& s : sinks) {
    for (auto pos = text.find(s); pos != std::string_view::npos; pos = text.find(s, pos + 1)) {
      if (whole_word_at(text, pos, s.size())) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<PackageRef> enumerate_dependency_chain(const fs::path& project_dir,
                                                   Diagnostics* diag) {
  fs::path project = fs::weakly_canonical(project_dir);
  Manifest root = read_manifest(project, true);
  std::error_code ec;
  if (!root.deps.empty() && !fs::is_directory(project / "node_modules", ec)) {
    throw NotFoundError("dependencies of " + project.string() +
                        " are not installed (no node_modules); run the package install first");
  }

  std::vector<PackageRef> out;
  std::set<fs::path> seen{project};
  std::deque<std::pair<fs::path, Manifest>> queue;
  queue.emplace_back(project, root);
  while (!queue.empty()) {
    auto [dir, manifest] = std::move(queue.front());
    queue.pop_front();
    PackageRef ref;
    ref.name = manifest.name;
    ref.version = manifest.version;
    ref.root_dir = dir;
    for (auto& f : walk(dir, false)) {
      if (is_script_source(f)) ref.source_files.push_back(std::move(f));
    }
    out.push_back(std::move(ref));

    for (const auto& dep : manifest.deps) {
      auto found = resolve_package(dir, dep, project);
      if (!found) {
        if (!manifest.optional.count(dep)) {
          warn(diag, "analyze", manifest.name + ": dependency " + dep + " is not installed");
        }
        continue;
      }
      fs::path canonical = fs::weakly_canonical(*found);
      if (!seen.insert(canonical).second) continue;
      queue.emplace_back(canonical, read_manifest(canonical, false));
    }
  }
  return out;
}

std::vector<PackageRef> filter_packages(const std::vector<PackageRef>& packages,
                                        const std::vector<std::string>& sinks,
                                        Diagnostics* diag) {
  std::vector<PackageRef> out;
  for (std::size_t i = 0; i < packages.size(); ++i) {
    const auto& pkg = packages[i];
    bool keep = i == 0;
    for (const auto& f : pkg.source_files) {
      if (keep) break;
      auto text = slurp(f);
      if (!text) {
        warn(diag, "analyze", "cannot read " + f.string() + "; skipped");
        continue;
      }
      keep = mentions_sink(*text, sinks);
    }
    if (keep) out.push_back(pkg);
  }
  return out;
}

std::vector<TaintPath> analyze_data_dependencies(const PackageRef& package,
                                                 const std::vector<std::string>& sinks,
                                                 Diagnostics* diag) {
  std::vector<TaintPath> out;
  for (const auto& f : package.source_files) {
    auto text = slurp(f);
    if (!text) {
      warn(diag, "analyze", "cannot read " + f.string() + "; skipped");
      continue;
    }
    if (!mentions_sink(*text, sinks)) continue;
    try {
      for (auto& p : analyze_source(*text, f.string(), sinks)) out.push_back(std::move(p));
    } catch (const FormatError& e) {
      warn(diag, "analyze", f.string() + ": parse failed (" + e.what() + "); skipped");
    }
  }
  return out;
}

bool is_shell_shebang(std::string_view content) {
  if (!content.starts_with("#!")) return false;
  auto end = content.find('\n');
  auto words = split_whitespace(content.substr(2, end == std::string_view::npos ? end : end - 2));
  if (words.empty()) return false;
  std::string interp = fs::path(words[0]).filename().string();
  if (interp == "env" && words.size() > 1) interp = words[1];
  static const std::set<std::string> shells = {"sh", "bash", "dash", "ash", "zsh", "ksh", "busybox"};
  return shells.count(interp) != 0;
}

std::vector<fs::path> find_shell_scripts(const fs::path& root, bool include_dependencies) {
  std::vector<fs::path> out;
  for (auto& f : walk(root, include_dependencies)) {
    std::string name = f.filename().string();
    bool match = f.extension() == ".sh" || name.starts_with("docker-entrypoint");
    if (!match) {
      std::ifstream in(f, std::ios::binary);
      char head[128] = {};
      in.read(head, sizeof head);
      match = is_shell_shebang(std::string_view(head, static_cast<std::size_t>(in.gcount())));
    }
    if (match) out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::string> split_command_words(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case ';':
      case '&':
      case '|':
      case '(':
      case ')':
      case '<':
      case '>':
      case '`':
        cleaned += ' ';
        break;
      case '\'':
      case '"':
        break;
      default:
        cleaned += c;
    }
  }
  return split_whitespace(cleaned);
}

CommandTokenList extract_command_tokens(const std::vector<TaintPath>& paths,
                                        const std::vector<fs::path>& shell_files,
                                        Diagnostics* diag) {
  CommandTokenList ctl;
  for (const auto& p : paths) {
    if (!p.resolved()) {
      ctl.add_unresolved(p.sink_location);
      continue;
    }
    if (p.uses_shell) ctl.add({"/bin/sh", Provenance::kExecArgument, p.sink_location});
    for (const auto& v : p.resolved_values) {
      for (auto& w : split_command_words(v)) {
        ctl.add({std::move(w), Provenance::kExecArgument, p.sink_location});
      }
    }
    for (const auto& v : p.argument_values) {
      for (auto& w : split_command_words(v)) {
        ctl.add({std::move(w), Provenance::kExecArgument, p.sink_location});
      }
    }
  }
  for (const auto& f : shell_files) {
    auto text = slurp(f);
    if (!text) {
      warn(diag, "analyze", "cannot read " + f.string() + "; skipped");
      continue;
    }
    Provenance prov = f.filename().string().starts_with("docker-entrypoint")
                          ? Provenance::kEntrypointScript
                          : Provenance::kShellScript;
    std::size_t markers = add_shell_tokens(ctl, *text, prov, f.string());
    if (markers > 0) {
      info(diag, "analyze",
           f.string() + ": " + std::to_string(markers) + " word(s) with parameter expansion skipped");
    }
  }
  return ctl;
}

}  // namespace imgslim
