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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "imgslim/pipeline.hpp"
#include "imgslim/shell_tokenizer.hpp"

namespace py = pybind11;
using namespace imgslim;

namespace {

std::string dump(const nlohmann::json& j) { return j.dump(); }

UnresolvedPolicy policy_from(const std::string& name) {
  if (name == "warn") return UnresolvedPolicy::kWarn;
  if (name == "strict") return UnresolvedPolicy::kStrict;
  if (name == "conservative") return UnresolvedPolicy::kConservative;
  throw InvalidArgument("policy must be warn, strict or conservative");
}

nlohmann::json diagnostics_json(const Diagnostics& d) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : d.entries()) {
    out.push_back({{"severity", e.severity == Severity::kWarning ? "warning" : "info"},
                   {"stage", e.stage},
                   {"message", e.message}});
  }
  return out;
}

std::string analyze_project_json(const std::string& project,
                                 const std::optional<std::vector<std::string>>& sinks) {
  AnalysisOptions opts;
  if (sinks) opts.sinks = *sinks;
  Diagnostics diag;
  AnalysisResult r;
  {
    py::gil_scoped_release release;
    r = analyze_project(project, opts, &diag);
  }
  nlohmann::json j = r.to_json();
  j["ctl_text"] = format_ctl(r.ctl);
  j["diagnostics"] = diagnostics_json(diag);
  return dump(j);
}

std::string slim_json(const std::string& input, const std::string& output,
                      const std::string& ctl_text, const std::string& policy,
                      const std::string& layout, bool gzip,
                      const std::optional<std::vector<std::string>>& search_dirs) {
  SlimOptions opts;
  opts.policy = policy_from(policy);
  if (layout == "docker") {
    opts.build.layout = ImageLayout::kDockerSave;
  } else if (layout != "oci") {
    throw InvalidArgument("layout must be oci or docker");
  }
  opts.build.gzip_layers = gzip;
  if (search_dirs) opts.search_dirs = *search_dirs;
  Diagnostics diag;
  nlohmann::json j;
  {
    py::gil_scoped_release release;
    LoadedImage image = load_image_archive(input, &diag);
    SlimResult r = slim_image(image, parse_ctl(ctl_text), opts, &diag);
    write_file(output, r.archive.bytes);
    j = r.rootfs.report.to_json();
    j["output_archive_size"] = r.archive.size();
    j["retained_paths"] = r.rootfs.retain.paths;
  }
  j["diagnostics"] = diagnostics_json(diag);
  return dump(j);
}

std::string inspect_json(const std::string& path) {
  std::string bytes = read_file(path);
  LoadedImage image = load_image_archive_bytes(bytes);
  return dump(inspect_image(image, bytes.size()).to_json());
}

std::string model_listing_json(const std::string& listing,
                               const std::optional<std::vector<std::string>>& search_dirs) {
  FileInfoList info = parse_listing(listing);
  auto dirs = search_dirs ? *search_dirs : default_search_dirs();
  CommandLinkedList cll = model_commands(info, dirs);
  return dump({{"entries", info.size()},
               {"commands", count_commands(cll)},
               {"cll", cll.to_json()}});
}

std::vector<std::string> resolve_chain_listing(const std::string& listing,
                                               const std::string& start) {
  FileInfoList info = parse_listing(listing);
  return resolve_chain(model_commands(info), start);
}

std::vector<std::string> tokenize_shell_words(const std::string& script) {
  std::vector<std::string> out;
  for (auto& w : tokenize_shell(script).words) out.push_back(std::move(w.text));
  return out;
}

std::string analyze_source_json(const std::string& source, const std::string& file) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : analyze_source(source, file)) out.push_back(p.to_json());
  return dump(out);
}

}  // namespace

PYBIND11_MODULE(_imgslim, m) {
  m.doc() = "imgslim native core";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<FormatError> format_error(m, "FormatError", error.ptr());
  static py::exception<IntegrityError> integrity_error(m, "IntegrityError", error.ptr());
  static py::exception<SecurityError> security_error(m, "SecurityError", error.ptr());
  static py::exception<NotFoundError> not_found(m, "NotFoundError", error.ptr());
  static py::exception<AnalysisError> analysis_error(m, "AnalysisError", error.ptr());
  static py::exception<ConsistencyError> consistency_error(m, "ConsistencyError", error.ptr());
  static py::exception<InvalidArgument> invalid_argument(m, "InvalidArgument", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const FormatError& e) {
      PyErr_SetString(format_error.ptr(), e.what());
    } catch (const IntegrityError& e) {
      PyErr_SetString(integrity_error.ptr(), e.what());
    } catch (const SecurityError& e) {
      PyErr_SetString(security_error.ptr(), e.what());
    } catch (const NotFoundError& e) {
      PyErr_SetString(not_found.ptr(), e.what());
    } catch (const AnalysisError& e) {
      PyErr_SetString(analysis_error.ptr(), e.what());
    } catch (const ConsistencyError& e) {
      PyErr_SetString(consistency_error.ptr(), e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(invalid_argument.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("analyze_project_json", &analyze_project_json, py::arg("project_dir"),
        py::arg("sinks") = py::none());
  m.def("slim_json", &slim_json, py::arg("input"), py::arg("output"), py::arg("ctl_text"),
        py::arg("policy") = "warn", py::arg("layout") = "oci", py::arg("gzip") = false,
        py::arg("search_dirs") = py::none());
  m.def("inspect_json", &inspect_json, py::arg("path"));
  m.def("model_listing_json", &model_listing_json, py::arg("listing"),
        py::arg("search_dirs") = py::none());
  m.def("resolve_chain", &resolve_chain_listing, py::arg("listing"), py::arg("start"));
  m.def("tokenize_shell", &tokenize_shell_words, py::arg("script"));
  m.def("analyze_source_json", &analyze_source_json, py::arg("source"),
        py::arg("file") = "<source>");
  m.def("default_sinks", &default_sinks);
  m.def("default_search_dirs", &default_search_dirs);
}
