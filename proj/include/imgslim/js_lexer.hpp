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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace imgslim::js {

enum class TokenKind { kIdentifier, kString, kNumber, kPunct, kRegex, kTemplate, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  // Identifier name, decoded string value, punctuator, or raw literal text.
  std::string text;
  int line = 0;
  // Template literals: decoded quasis (one more than expressions) and the
  // raw source of each ${...} expression with its starting line.
  std::vector<std::string> quasis;
  std::vector<std::string> expressions;
  std::vector<int> expression_lines;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool punct(std::string_view t) const { return is(TokenKind::kPunct, t); }
  bool ident(std::string_view t) const { return is(TokenKind::kIdentifier, t); }
};

// Always ends with a kEnd token. Throws FormatError on unterminated
// strings, comments, templates or regular expressions.
std::vector<Token> tokenize(std::string_view source, int first_line = 1);

bool is_reserved_word(std::string_view word);

}  // namespace imgslim::js
