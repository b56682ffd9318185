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

#include "imgslim/tokens.hpp"

namespace imgslim {

struct ShellWord {
  std::string text;
  int line = 0;
};

struct ShellTokens {
  std::vector<ShellWord> words;
  // Lines of words dropped because they contain a parameter expansion.
  std::vector<int> unresolved_lines;
};

// Plain word splitting: comments stripped, quotes removed, separators
// (; & | ( ) < > newline, backquote, $( ) split words. Quoted text is
// re-split on whitespace so `sh -c "a b"` yields a and b. Words with a
// parameter expansion are dropped. A shebang line contributes its words.
ShellTokens tokenize_shell(std::string_view script);

// Returns the number of unresolved expansion markers.
std::size_t add_shell_tokens(CommandTokenList& ctl, std::string_view script,
                             Provenance provenance, const std::string& file);

}  // namespace imgslim
