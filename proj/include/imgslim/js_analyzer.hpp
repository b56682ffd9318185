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

#include <nlohmann/json.hpp>

#include "imgslim/tokens.hpp"

namespace imgslim {

// Kind of the definition a sink argument was traced back to. kLiteral marks
// arguments that are constant at the call site itself.
enum class SourceKind { kVariableDeclarator, kAssignment, kCallResult, kLiteral };

std::string_view to_string(SourceKind kind);

struct TaintPath {
  SourceKind source_kind = SourceKind::kLiteral;
  SourceLocation source_location;
  // Definition sites between source and sink, source first.
  std::vector<SourceLocation> steps;
  SourceLocation sink_location;
  std::string sink;
  // Maximal constant fragments of the command argument. Empty when nothing
  // about the argument is constant.
  std::vector<std::string> resolved_values;
  // Constant fragments of an argv array passed as second argument.
  std::vector<std::string> argument_values;
  // The sink runs its command through /bin/sh.
  bool uses_shell = false;

  bool resolved() const { return !resolved_values.empty(); }
  nlohmann::json to_json() const;
};

const std::vector<std::string>& default_sinks();

// Analyzes one script source. Throws FormatError when the source cannot be
// tokenized.
std::vector<TaintPath> analyze_source(std::string_view source, const std::string& file,
                                      const std::vector<std::string>& sinks = default_sinks());

}  // namespace imgslim
