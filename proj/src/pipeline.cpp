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


#include "imgslim/pipeline.hpp"

#include <charconv>
#include <future>
#include <sstream>

#include "imgslim/path.hpp"
#include "imgslim/shell_tokenizer.hpp"

namespace imgslim {

namespace fs = std::filesystem;

nlohmann::json AnalysisResult::to_json() const {
  nlohmann::json pkgs = nlohmann::json::array();
  for (const auto& p : packages) {
    bool kept = std::any_of(filtered.begin(), filtered.end(),
                            [&](const PackageRef& f) { return f.root_dir == p.root_dir; });
    pkgs.push_back({{"name", p.name},
                    {"version", p.version},
                    {"root_dir", p.root_dir.string()},
                    {"source_files", p.source_files.size()},
                    {"analyzed", kept}});
  }
  nlohmann::json taint = nlohmann::json::array();
  for (const auto& t : paths) taint.push_back(t.to_json());
  nlohmann::json scripts = nlohmann::json::array();
  for (const auto& s : shell_files) scripts.push_back(s.string());
  return {{"packages", pkgs},
          {"taint_paths", taint},
          {"shell_scripts", scripts},
          {"ctl", ctl.to_json()}};
}

AnalysisResult analyze_project(const fs::path& project_dir, const AnalysisOptions& options,
                               Diagnostics* diag) {
  AnalysisResult r;
  r.packages = enumerate_dependency_chain(project_dir, diag);
  r.filtered = filter_packages(r.packages, options.sinks, diag);

  // Each task gets its own diagnostics; merged in chain order afterwards.
  std::vector<std::future<std::pair<std::vector<TaintPath>, Diagnostics>>> tasks;
  for (const auto& pkg : r.filtered) {
    tasks.push_back(std::async(std::launch::async, [&pkg, &options] {
      Diagnostics local;
      auto paths = analyze_data_dependencies(pkg, options.sinks, &local);
      return std::make_pair(std::move(paths), std::move(local));
    }));
  }
  for (auto& t : tasks) {
    auto [paths, local] = t.get();
    for (const auto& d : local.entries()) {
      if (d.severity == Severity::kWarning) {
        warn(diag, d.stage, d.message);
      } else {
        info(diag, d.stage, d.message);
      }
    }
    for (auto& p : paths) r.paths.push_back(std::move(p));
  }

  r.shell_files = find_shell_scripts(project_dir, options.include_dependency_scripts);
  r.ctl = extract_command_tokens(r.paths, r.shell_files, diag);
  for (const auto& s : r.ctl.unresolved_sinks()) {
    warn(diag, "analyze", "unresolved exec argument at " + s.to_string());
  }
  if (r.ctl.empty()) warn(diag, "analyze", "no command tokens found");
  return r;
}

void add_image_config_tokens(CommandTokenList& ctl, const ImageMetadata& metadata,
                             const FileInfoList& info, const CommandLinkedList& cll) {
  std::vector<std::string> words;
  for (const auto* list : {&metadata.entrypoint, &metadata.cmd}) {
    if (!*list) continue;
    for (const auto& w : **list) words.push_back(w);
  }
  SourceLocation origin{"image-config", 0};
  std::set<std::string> scripts;
  for (const auto& w : words) {
    for (auto& t : split_command_words(w)) {
      // Shell-form commands: the script may be named by path or by command.
      std::vector<std::string> candidates;
      if (vpath::is_absolute(t)) {
        candidates.push_back(t);
      } else if (cll.contains(t)) {
        candidates = resolve_chain(cll, t);
      } else if (metadata.working_dir && t.find('/') != std::string::npos) {
        candidates.push_back(vpath::join(*metadata.working_dir, t));
      }
      for (const auto& c : candidates) {
        Resolution r = info.realpath(c);
        if (r.ok() && r.record != nullptr && r.record->is_file() &&
            is_shell_shebang(r.record->content.view())) {
          scripts.insert(r.path);
        }
      }
      ctl.add({std::move(t), Provenance::kImageConfig, origin});
    }
  }
  for (const auto& [path, rec] : info.records()) {
    if (rec.is_file() && vpath::basename(path).starts_with("docker-entrypoint")) {
      scripts.insert(path);
    }
  }
  for (const auto& s : scripts) {
    const FileRecord* rec = info.find(s);
    if (rec == nullptr) continue;
    add_shell_tokens(ctl, rec->content.view(), Provenance::kEntrypointScript, s);
  }
}

RootfsSlimResult slim_rootfs(const FileInfoList& info, CommandTokenList ctl,
                             const ImageMetadata& metadata, const SlimOptions& options,
                             Diagnostics* diag) {
  if (options.policy == UnresolvedPolicy::kStrict && !ctl.unresolved_sinks().empty()) {
    std::string where;
    for (const auto& s : ctl.unresolved_sinks()) where += (where.empty() ? "" : ", ") + s.to_string();
    throw AnalysisError("unresolved exec arguments (strict mode): " + where);
  }
  if (options.policy == UnresolvedPolicy::kWarn) {
    for (const auto& s : ctl.unresolved_sinks()) {
      warn(diag, "prune",
           "unresolved exec argument at " + s.to_string() + "; its command may be pruned");
    }
  }
  RootfsSlimResult r;
  r.cll = model_commands(info, options.search_dirs, diag);
  if (options.use_image_config) add_image_config_tokens(ctl, metadata, info, r.cll);
  r.ctl = std::move(ctl);
  r.match = match_tokens(r.ctl, r.cll);

  PruneOptions prune;
  prune.protected_substrings = options.protected_substrings;
  prune.conservative = options.policy == UnresolvedPolicy::kConservative;
  if (options.use_image_config && metadata.entrypoint && !metadata.entrypoint->empty() &&
      vpath::is_absolute(metadata.entrypoint->front())) {
    prune.entry_paths.push_back(metadata.entrypoint->front());
  }
  r.retain = build_retain_list(r.match.start_nodes, r.cll, info, prune, diag);
  for (const auto& m : r.retain.missing_libraries) {
    warn(diag, "prune", m.object + " needs " + m.needed + ", which the rootfs does not provide");
  }

  auto kept = retained_records(info, r.retain);
  r.rootfs_tar = write_rootfs_tar(kept);
  FileInfoList after(std::move(kept));
  r.cll_after = model_commands(after, options.search_dirs);
  r.report = compute_report(info, r.cll, r.retain, r.cll_after, r.match);
  return r;
}

SlimResult slim_image(const LoadedImage& image, CommandTokenList ctl, const SlimOptions& options,
                      Diagnostics* diag) {
  SlimResult r;
  FlattenedRootfs flat = flatten_layers(image.layers, diag);
  FileInfoList info = scan_rootfs(flat);
  r.rootfs = slim_rootfs(info, std::move(ctl), image.metadata, options, diag);
  r.archive = build_slim_image(image.metadata, r.rootfs.rootfs_tar, options.build);
  return r;
}

nlohmann::json metadata_to_json(const ImageMetadata& m) {
  nlohmann::json ports = nlohmann::json::array();
  for (const auto& p : m.exposed_ports) ports.push_back(p.to_string());
  nlohmann::json j = {{"image_name", m.image_name},
                      {"tag", m.tag},
                      {"architecture", m.architecture},
                      {"os", m.os},
                      {"exposed_ports", ports},
                      {"env", m.env_vars},
                      {"labels", m.labels}};
  j["entrypoint"] = m.entrypoint ? nlohmann::json(*m.entrypoint) : nlohmann::json(nullptr);
  j["cmd"] = m.cmd ? nlohmann::json(*m.cmd) : nlohmann::json(nullptr);
  j["working_dir"] = m.working_dir ? nlohmann::json(*m.working_dir) : nlohmann::json(nullptr);
  return j;
}

InspectResult inspect_image(const LoadedImage& image, std::uint64_t archive_size,
                            const std::vector<std::string>& search_dirs, Diagnostics* diag) {
  InspectResult r;
  r.metadata = image.metadata;
  r.layout = image.layout;
  r.layer_count = image.layers.layers.size();
  r.archive_size = archive_size;
  FlattenedRootfs flat = flatten_layers(image.layers, diag);
  r.rootfs_size = flat.total_size();
  r.entry_count = flat.entries.size();
  FileInfoList info = scan_rootfs(flat);
  r.command_count = count_commands(model_commands(info, search_dirs, diag));
  return r;
}

nlohmann::json InspectResult::to_json() const {
  return {{"metadata", metadata_to_json(metadata)},
          {"layout", std::string(to_string(layout))},
          {"layers", layer_count},
          {"archive_size", archive_size},
          {"rootfs_size", rootfs_size},
          {"entries", entry_count},
          {"commands", command_count}};
}

namespace {

std::string join_words(const std::optional<std::vector<std::string>>& words) {
  if (!words) return "none";
  std::string out;
  for (const auto& w : *words) out += (out.empty() ? "" : " ") + w;
  return "[" + out + "]";
}

}  // namespace

std::string InspectResult::to_text() const {
  std::ostringstream out;
  std::string ref = metadata.reference();
  out << "image: " << (ref.empty() ? "<none>" : ref) << "\n"
      << "layout: " << to_string(layout) << "\n"
      << "platform: " << metadata.os << "/" << metadata.architecture << "\n"
      << "entrypoint: " << join_words(metadata.entrypoint) << "\n"
      << "cmd: " << join_words(metadata.cmd) << "\n"
      << "workdir: " << metadata.working_dir.value_or("none") << "\n"
      << "exposed ports:";
  if (metadata.exposed_ports.empty()) out << " none";
  for (const auto& p : metadata.exposed_ports) out << " " << p.to_string();
  out << "\n"
      << "layers: " << layer_count << "\n"
      << "archive size: " << format_size(archive_size) << "\n"
      << "rootfs size: " << format_size(rootfs_size) << " in " << entry_count << " entries\n"
      << "commands: " << command_count << "\n";
  return out.str();
}

FileInfoList parse_listing(std::string_view text) {
  std::map<std::string, FileRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto words = split_whitespace(line);
    if (words.empty() || words[0].starts_with("#")) continue;
    auto fail = [&](const std::string& why) {
      throw FormatError("listing line " + std::to_string(lineno) + ": " + why);
    };
    if (words.size() < 3) fail("expected '<kind> <mode> <path>'");
    auto number = [&](const std::string& word, int base, auto& out, const char* what) {
      auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), out, base);
      if (ec != std::errc() || end != word.data() + word.size()) {
        fail(std::string("bad ") + what + " '" + word + "'");
      }
    };
    FileRecord rec;
    number(words[1], 8, rec.mode, "mode");
    if (rec.mode > 07777) fail("bad mode '" + words[1] + "'");
    if (!vpath::is_absolute(words[2])) fail("path must be absolute");
    rec.path = vpath::normalize(words[2]);
    if (rec.path == "/") continue;
    const std::string& kind = words[0];
    if (kind == "d") {
      rec.kind = FileKind::kDirectory;
    } else if (kind == "f") {
      rec.kind = FileKind::kRegular;
      if (words.size() > 3) number(words[3], 10, rec.size, "size");
    } else if (kind == "l" || kind == "h") {
      std::string arrow = kind == "l" ? "->" : "=>";
      if (words.size() != 5 || words[3] != arrow) fail("expected '" + arrow + " target'");
      rec.kind = kind == "l" ? FileKind::kSymlink : FileKind::kHardlink;
      rec.link_target = kind == "l" ? words[4] : vpath::normalize(words[4]);
    } else {
      fail("unknown kind '" + kind + "'");
    }
    // Parents missing from the listing become plain directories.
    for (const auto& a : vpath::ancestors(rec.path)) {
      if (records.count(a)) continue;
      FileRecord dir;
      dir.path = a;
      dir.kind = FileKind::kDirectory;
      dir.mode = 0755;
      records.emplace(a, dir);
    }
    records[rec.path] = std::move(rec);
  }
  return FileInfoList(std::move(records));
}

std::string format_listing(const FileInfoList& info) {
  std::ostringstream out;
  for (const auto& [path, rec] : info.records()) {
    char mode[8];
    std::snprintf(mode, sizeof mode, "%04o", rec.mode & 07777);
    switch (rec.kind) {
      case FileKind::kDirectory:
        out << "d " << mode << " " << path << "\n";
        break;
      case FileKind::kSymlink:
        out << "l " << mode << " " << path << " -> " << rec.link_target.value_or("") << "\n";
        break;
      case FileKind::kHardlink:
        out << "h " << mode << " " << path << " => " << rec.link_target.value_or("") << "\n";
        break;
      default:
        out << "f " << mode << " " << path << " " << rec.size << "\n";
    }
  }
  return out.str();
}

}  // namespace imgslim
