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


#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "imgslim/pipeline.hpp"

namespace imgslim {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto words = split_whitespace(item);
    if (!words.empty()) out.push_back(words.front());
  }
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

struct AnalyzeArgs {
  std::string project;
  std::string output;
  std::string report;
  std::string sinks;
  bool strict = false;
  bool include_dependency_scripts = false;
};

struct SlimArgs {
  std::string input;
  std::string output;
  std::string project;
  std::string ctl;
  std::string format = "oci";
  std::string report;
  std::string search_dirs;
  std::string sinks;
  std::string cll_dump;
  std::string retain_list;
  std::string ctl_out;
  bool strict = false;
  bool conservative = false;
  bool gzip = false;
  bool ignore_image_config = false;
  bool include_dependency_scripts = false;
};

struct InspectArgs {
  std::string input;
  std::string listing;
  std::string search_dirs;
  bool json = false;
};

int cmd_analyze(const AnalyzeArgs& a, Diagnostics& diag) {
  AnalysisOptions opts;
  if (!a.sinks.empty()) opts.sinks = split_list(a.sinks);
  opts.include_dependency_scripts = a.include_dependency_scripts;
  AnalysisResult r = analyze_project(a.project, opts, &diag);
  if (!a.report.empty()) write_json(a.report, r.to_json());
  std::string ctl = format_ctl(r.ctl);
  if (a.output.empty() || a.output == "-") {
    std::cout << ctl;
  } else {
    write_file(a.output, ctl);
  }
  std::cerr << "analyze: " << r.packages.size() << " package(s), " << r.filtered.size()
            << " analyzed, " << r.paths.size() << " exec call(s), " << r.ctl.size()
            << " token(s), " << r.ctl.unresolved_sinks().size() << " unresolved\n";
  if (a.strict && !r.ctl.unresolved_sinks().empty()) {
    for (const auto& s : r.ctl.unresolved_sinks()) {
      std::cerr << "error: unresolved exec argument at " << s.to_string() << "\n";
    }
    return kExitAnalysis;
  }
  return kExitOk;
}

int cmd_slim(const SlimArgs& a, Diagnostics& diag) {
  if (a.project.empty() && a.ctl.empty()) {
    std::cerr << "error: slim needs --project or --ctl\n";
    return kExitUsage;
  }
  std::error_code ec;
  if (fs::weakly_canonical(a.input, ec) == fs::weakly_canonical(a.output, ec)) {
    std::cerr << "error: --input and --output must differ\n";
    return kExitUsage;
  }

  CommandTokenList ctl;
  if (!a.ctl.empty()) ctl.merge(parse_ctl(read_file(a.ctl), a.ctl));
  if (!a.project.empty()) {
    AnalysisOptions opts;
    if (!a.sinks.empty()) opts.sinks = split_list(a.sinks);
    opts.include_dependency_scripts = a.include_dependency_scripts;
    ctl.merge(analyze_project(a.project, opts, &diag).ctl);
  }

  SlimOptions opts;
  if (!a.search_dirs.empty()) opts.search_dirs = split_list(a.search_dirs);
  opts.policy = a.strict         ? UnresolvedPolicy::kStrict
                : a.conservative ? UnresolvedPolicy::kConservative
                                 : UnresolvedPolicy::kWarn;
  opts.build.layout = a.format == "docker" ? ImageLayout::kDockerSave : ImageLayout::kOci;
  opts.build.gzip_layers = a.gzip;
  opts.use_image_config = !a.ignore_image_config;

  LoadedImage image = load_image_archive(a.input, &diag);
  SlimResult r = slim_image(image, std::move(ctl), opts, &diag);
  write_file(a.output, r.archive.bytes);

  if (!a.report.empty()) {
    nlohmann::json j = r.rootfs.report.to_json();
    j["input"] = a.input;
    j["output"] = a.output;
    j["input_archive_size"] = fs::file_size(a.input, ec);
    j["output_archive_size"] = r.archive.size();
    j["layer_diff_id"] = r.archive.layer_diff_id;
    j["unresolved_sinks"] = r.rootfs.ctl.to_json()["unresolved_sinks"];
    write_json(a.report, j);
  }
  if (!a.cll_dump.empty()) write_file(a.cll_dump, r.rootfs.cll.to_text());
  if (!a.retain_list.empty()) write_json(a.retain_list, r.rootfs.retain.to_json());
  if (!a.ctl_out.empty()) write_file(a.ctl_out, format_ctl(r.rootfs.ctl));
  std::cout << r.rootfs.report.to_table();
  return kExitOk;
}

int cmd_inspect(const InspectArgs& a, Diagnostics& diag) {
  std::vector<std::string> dirs =
      a.search_dirs.empty() ? default_search_dirs() : split_list(a.search_dirs);
  if (!a.listing.empty()) {
    FileInfoList info = parse_listing(read_file(a.listing));
    std::size_t commands = count_commands(model_commands(info, dirs, &diag));
    if (a.json) {
      std::cout << nlohmann::json{{"entries", info.size()}, {"commands", commands}}.dump(2)
                << "\n";
    } else {
      std::cout << "entries: " << info.size() << "\ncommands: " << commands << "\n";
    }
    return kExitOk;
  }
  if (a.input.empty()) {
    std::cerr << "error: inspect needs --input or --listing\n";
    return kExitUsage;
  }
  std::string bytes = read_file(a.input);
  LoadedImage image = load_image_archive_bytes(bytes, &diag);
  InspectResult r = inspect_image(image, bytes.size(), dirs, &diag);
  std::cout << (a.json ? r.to_json().dump(2) + "\n" : r.to_text());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Static container image slimming"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings on stderr");
  app.set_version_flag("--version", "imgslim 0.1.0");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Extract the command token list of a project");
  analyze->add_option("--project", aa.project, "Project directory")->required();
  analyze->add_option("--output", aa.output, "CTL output file (default: stdout)");
  analyze->add_option("--report", aa.report, "Analysis report JSON");
  analyze->add_option("--sinks", aa.sinks, "Comma-separated exec-family sink names");
  analyze->add_flag("--strict", aa.strict, "Fail when an exec argument cannot be resolved");
  analyze->add_flag("--include-dependency-scripts", aa.include_dependency_scripts,
                    "Also tokenize shell scripts inside node_modules");

  SlimArgs sa;
  auto* slim = app.add_subcommand("slim", "Build a slim image");
  slim->add_option("--input", sa.input, "Fat image archive")->required();
  slim->add_option("--output", sa.output, "Slim image archive")->required();
  slim->add_option("--project", sa.project, "Project directory to analyze");
  slim->add_option("--ctl", sa.ctl, "Command token list file");
  auto* strict = slim->add_flag("--strict", sa.strict, "Abort on unresolved exec arguments");
  auto* conservative =
      slim->add_flag("--conservative", sa.conservative, "Disable pruning entirely");
  strict->excludes(conservative);
  slim->add_option("--format", sa.format, "Output layout")
      ->check(CLI::IsMember({"oci", "docker"}));
  slim->add_flag("--gzip", sa.gzip, "Compress the output layer");
  slim->add_option("--report", sa.report, "Prune report JSON");
  slim->add_option("--search-dirs", sa.search_dirs, "Comma-separated command directories");
  slim->add_option("--sinks", sa.sinks, "Comma-separated exec-family sink names");
  slim->add_option("--cll-dump", sa.cll_dump, "Write the command linked list");
  slim->add_option("--retain-list", sa.retain_list, "Write the retain list JSON");
  slim->add_option("--ctl-out", sa.ctl_out, "Write the final CTL");
  slim->add_flag("--ignore-image-config", sa.ignore_image_config,
                 "Do not add Entrypoint/Cmd tokens");
  slim->add_flag("--include-dependency-scripts", sa.include_dependency_scripts,
                 "Also tokenize shell scripts inside node_modules");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "Show image metadata and command count");
  inspect->add_option("--input", ia.input, "Image archive");
  inspect->add_option("--listing", ia.listing, "Recorded directory listing instead of an image");
  inspect->add_option("--search-dirs", ia.search_dirs, "Comma-separated command directories");
  inspect->add_flag("--json", ia.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Diagnostics diag;
  diag.set_echo(!quiet);
  try {
    if (*analyze) return cmd_analyze(aa, diag);
    if (*slim) return cmd_slim(sa, diag);
    return cmd_inspect(ia, diag);
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitConsistency;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const SecurityError& e) {
    std::cerr << "security error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace imgslim
