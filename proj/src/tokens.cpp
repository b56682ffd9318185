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


#include "imgslim/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "imgslim/error.hpp"

namespace imgslim {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kExecArgument:
      return "exec-argument";
    case Provenance::kShellScript:
      return "shell-script";
    case Provenance::kEntrypointScript:
      return "entrypoint-script";
    case Provenance::kImageConfig:
      return "image-config";
    case Provenance::kUser:
      return "user";
  }
  return "user";
}

Provenance provenance_from_string(std::string_view name) {
  for (auto p : {Provenance::kExecArgument, Provenance::kShellScript,
                 Provenance::kEntrypointScript, Provenance::kImageConfig, Provenance::kUser}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown token provenance: " + std::string(name));
}

std::string SourceLocation::to_string() const {
  return line > 0 ? file + ":" + std::to_string(line) : file;
}

bool CommandTokenList::add(CommandToken token) {
  if (token.token.empty()) throw InvalidArgument("empty command token");
  if (std::any_of(token.token.begin(), token.token.end(), is_space)) {
    throw InvalidArgument("command token contains whitespace: '" + token.token + "'");
  }
  if (!index_.insert(token.token).second) return false;
  tokens_.push_back(std::move(token));
  return true;
}

void CommandTokenList::add_unresolved(SourceLocation sink) {
  if (std::find(unresolved_.begin(), unresolved_.end(), sink) == unresolved_.end()) {
    unresolved_.push_back(std::move(sink));
  }
}

void CommandTokenList::merge(const CommandTokenList& other) {
  for (const auto& t : other.tokens_) add(t);
  for (const auto& s : other.unresolved_) add_unresolved(s);
}

bool CommandTokenList::contains(std::string_view text) const {
  return index_.count(std::string(text)) != 0;
}

std::vector<std::string> CommandTokenList::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens_.size());
  for (const auto& t : tokens_) out.push_back(t.token);
  return out;
}

nlohmann::json CommandTokenList::to_json() const {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : tokens_) {
    tokens.push_back({{"token", t.token},
                      {"provenance", to_string(t.provenance)},
                      {"origin", t.origin.to_string()}});
  }
  nlohmann::json unresolved = nlohmann::json::array();
  for (const auto& s : unresolved_) unresolved.push_back(s.to_string());
  return {{"tokens", tokens}, {"unresolved_sinks", unresolved}};
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

void add_words(CommandTokenList& ctl, std::string_view text, Provenance provenance,
               const SourceLocation& origin) {
  for (auto& w : split_whitespace(text)) ctl.add({std::move(w), provenance, origin});
}

std::string format_ctl(const CommandTokenList& ctl) {
  std::string out;
  for (const auto& s : ctl.unresolved_sinks()) out += "# unresolved: " + s.to_string() + "\n";
  for (const auto& t : ctl.tokens()) out += t.token + "\n";
  return out;
}

CommandTokenList parse_ctl(std::string_view text, std::string_view file) {
  CommandTokenList ctl;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = std::find_if_not(line.begin(), line.end(), is_space);
    if (first == line.end() || *first == '#') continue;
    add_words(ctl, line, Provenance::kUser, {std::string(file), lineno});
  }
  return ctl;
}

}  // namespace imgslim
