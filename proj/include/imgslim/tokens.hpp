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

#include <compare>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

namespace imgslim {

enum class Provenance {
  kExecArgument,
  kShellScript,
  kEntrypointScript,
  // Entrypoint/Cmd words from the image configuration.
  kImageConfig,
  // Hand-authored CTL file.
  kUser,
};

std::string_view to_string(Provenance p);
// Throws InvalidArgument for unknown names.
Provenance provenance_from_string(std::string_view name);

struct SourceLocation {
  std::string file;
  int line = 0;

  auto operator<=>(const SourceLocation&) const = default;
  std::string to_string() const;
};

struct CommandToken {
  std::string token;
  Provenance provenance = Provenance::kUser;
  SourceLocation origin;
};

// Insertion-ordered token set keyed by text; the first provenance wins.
class CommandTokenList {
 public:
  // Returns false for duplicates. Throws InvalidArgument for empty tokens
  // or tokens containing whitespace.
  bool add(CommandToken token);
  void add_unresolved(SourceLocation sink);
  void merge(const CommandTokenList& other);

  const std::vector<CommandToken>& tokens() const { return tokens_; }
  const std::vector<SourceLocation>& unresolved_sinks() const { return unresolved_; }
  bool contains(std::string_view text) const;
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::vector<std::string> texts() const;

  nlohmann::json to_json() const;

 private:
  std::vector<CommandToken> tokens_;
  std::unordered_set<std::string> index_;
  std::vector<SourceLocation> unresolved_;
};

std::vector<std::string> split_whitespace(std::string_view text);

// Splits `text` on whitespace and adds every word.
void add_words(CommandTokenList& ctl, std::string_view text, Provenance provenance,
               const SourceLocation& origin);

// One token per line. Unresolved sinks are written as comment lines.
std::string format_ctl(const CommandTokenList& ctl);
// Blank lines and lines starting with '#' are ignored; surrounding
// whitespace is trimmed and remaining words are split.
CommandTokenList parse_ctl(std::string_view text, std::string_view file = "<ctl>");

}  // namespace imgslim
