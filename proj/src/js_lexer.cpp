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


#include "imgslim/js_lexer.hpp"

#include <array>
#include <cctype>
#include <set>

#include "imgslim/error.hpp"

namespace imgslim::js {

namespace {

constexpr std::array<std::string_view, 46> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "?\?=", "=>",
    "==",   "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",  "++",  "--",  "+=",  "-=",
    "*=",   "/=",  "%=",  "&=",  "|=",  "^=",  "**",  "<<",  ">>",  "{",   "}",   "(",
    ")",    "[",   "]",   ";",   ",",   "<",   ">",   "+",   "-",   "*"};
constexpr std::string_view kSinglePunct = "/%&|^!~?:=.@#";

// Words after which a '/' starts a regular expression.
const std::set<std::string, std::less<>>& regex_prefix_words() {
  static const std::set<std::string, std::less<>> k = {
      "return", "typeof", "instanceof", "in",   "of",    "new",  "delete", "void",
      "throw",  "case",   "do",         "else", "yield", "await"};
  return k;
}

bool ident_start(unsigned char c) {
  return std::isalpha(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c) != 0; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Lexer {
 public:
  Lexer(std::string_view s, int line) : s_(s), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    if (s_.starts_with("#!")) skip_line();
    while (true) {
      Token t = next(out.empty() ? nullptr : &out.back());
      bool end = t.kind == TokenKind::kEnd;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(line_) + ": " + what);
  }

  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < s_.size() ? s_[i_ + ahead] : '\0';
  }

  void skip_line() {
    while (i_ < s_.size() && s_[i_] != '\n') ++i_;
  }

  void skip_trivia() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '/' && peek(1) == '/') {
        skip_line();
      } else if (c == '/' && peek(1) == '*') {
        auto end = s_.find("*/", i_ + 2);
        if (end == std::string_view::npos) fail("unterminated comment");
        for (std::size_t k = i_; k < end; ++k) line_ += s_[k] == '\n';
        i_ = end + 2;
      } else {
        break;
      }
    }
  }

  static bool regex_allowed(const Token* prev) {
    if (prev == nullptr) return true;
    switch (prev->kind) {
      case TokenKind::kIdentifier:
        return regex_prefix_words().count(prev->text) != 0;
      case TokenKind::kPunct:
        return prev->text != ")" && prev->text != "]";
      case TokenKind::kEnd:
        return true;
      default:
        return false;
    }
  }

  Token next(const Token* prev) {
    skip_trivia();
    Token t;
    t.line = line_;
    if (i_ >= s_.size()) return t;
    unsigned char c = static_cast<unsigned char>(s_[i_]);

    if (ident_start(c) || (c == '\\' && peek(1) == 'u')) {
      std::size_t start = i_;
      while (i_ < s_.size() && (ident_part(static_cast<unsigned char>(s_[i_])) || s_[i_] == '\\')) {
        ++i_;
      }
      t.kind = TokenKind::kIdentifier;
      t.text = std::string(s_.substr(start, i_ - start));
      return t;
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::size_t start = i_;
      while (i_ < s_.size()) {
        unsigned char d = static_cast<unsigned char>(s_[i_]);
        if (std::isalnum(d) || d == '.' || d == '_') {
          ++i_;
        } else if ((d == '+' || d == '-') && (s_[i_ - 1] == 'e' || s_[i_ - 1] == 'E') &&
                   !(s_.substr(start, 2) == "0x" || s_.substr(start, 2) == "0X")) {
          ++i_;
        } else {
          break;
        }
      }
      t.kind = TokenKind::kNumber;
      t.text = std::string(s_.substr(start, i_ - start));
      return t;
    }
    if (c == '"' || c == '\'') {
      ++i_;
      t.kind = TokenKind::kString;
      t.text = read_string(static_cast<char>(c));
      return t;
    }
    if (c == '`') {
      ++i_;
      read_template(t);
      return t;
    }
    if (c == '/' && regex_allowed(prev)) {
      t.kind = TokenKind::kRegex;
      t.text = read_regex();
      return t;
    }
    for (auto p : kPunctuators) {
      if (s_.substr(i_, p.size()) == p) {
        if (p == "?." && std::isdigit(static_cast<unsigned char>(peek(2)))) continue;
        t.kind = TokenKind::kPunct;
        t.text = std::string(p);
        i_ += p.size();
        return t;
      }
    }
    if (kSinglePunct.find(static_cast<char>(c)) != std::string_view::npos) {
      t.kind = TokenKind::kPunct;
      t.text = std::string(1, static_cast<char>(c));
      ++i_;
      return t;
    }
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  // Decodes one escape sequence; i_ points after the backslash.
  void read_escape(std::string& out) {
    if (i_ >= s_.size()) fail("unterminated escape");
    char e = s_[i_++];
    auto hex = [&](std::size_t n) {
      std::uint32_t v = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (i_ >= s_.size() || !std::isxdigit(static_cast<unsigned char>(s_[i_]))) {
          fail("bad hex escape");
        }
        v = v * 16 + static_cast<std::uint32_t>(std::stoi(std::string(1, s_[i_++]), nullptr, 16));
      }
      return v;
    };
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'v': out += '\v'; break;
      case '0': out += '\0'; break;
      case 'x': append_utf8(out, hex(2)); break;
      case 'u':
        if (peek() == '{') {
          ++i_;
          std::uint32_t v = 0;
          while (i_ < s_.size() && s_[i_] != '}') {
            if (!std::isxdigit(static_cast<unsigned char>(s_[i_]))) fail("bad unicode escape");
            v = v * 16 + static_cast<std::uint32_t>(std::stoi(std::string(1, s_[i_++]), nullptr, 16));
          }
          ++i_;
          append_utf8(out, v);
        } else {
          append_utf8(out, hex(4));
        }
        break;
      case '\r':
        if (peek() == '\n') ++i_;
        ++line_;
        break;
      case '\n':
        ++line_;
        break;
      default:
        out += e;
    }
  }

  std::string read_string(char quote) {
    std::string out;
    while (true) {
      if (i_ >= s_.size() || s_[i_] == '\n') fail("unterminated string literal");
      char c = s_[i_++];
      if (c == quote) return out;
      if (c == '\\') {
        read_escape(out);
      } else {
        out += c;
      }
    }
  }

  void read_template(Token& t) {
    t.kind = TokenKind::kTemplate;
    std::string quasi;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated template literal");
      char c = s_[i_++];
      if (c == '`') break;
      if (c == '\\') {
        read_escape(quasi);
      } else if (c == '$' && peek() == '{') {
        ++i_;
        t.quasis.push_back(std::move(quasi));
        quasi.clear();
        int line = line_;
        std::size_t start = i_;
        skip_balanced();
        t.expressions.emplace_back(s_.substr(start, i_ - 1 - start));
        t.expression_lines.push_back(line);
      } else {
        if (c == '\n') ++line_;
        quasi += c;
      }
    }
    t.quasis.push_back(std::move(quasi));
    t.text = "`";
  }

  // Advances past the '}' that closes a template substitution.
  void skip_balanced() {
    int depth = 0;
    const Token* prev = nullptr;
    Token last;
    while (true) {
      Token tok = next(prev);
      if (tok.kind == TokenKind::kEnd) fail("unterminated template substitution");
      if (tok.punct("{")) ++depth;
      if (tok.punct("}")) {
        if (depth == 0) return;
        --depth;
      }
      last = std::move(tok);
      prev = &last;
    }
  }

  std::string read_regex() {
    std::size_t start = i_++;
    bool in_class = false;
    while (true) {
      if (i_ >= s_.size() || s_[i_] == '\n') fail("unterminated regular expression");
      char c = s_[i_++];
      if (c == '\\') {
        ++i_;
      } else if (c == '[') {
        in_class = true;
      } else if (c == ']') {
        in_class = false;
      } else if (c == '/' && !in_class) {
        break;
      }
    }
    while (i_ < s_.size() && ident_part(static_cast<unsigned char>(s_[i_]))) ++i_;
    return std::string(s_.substr(start, i_ - start));
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, int first_line) {
  return Lexer(source, first_line).run();
}

bool is_reserved_word(std::string_view word) {
  static const std::set<std::string, std::less<>> k = {
      "break",  "case",   "catch",  "class",    "const",  "continue", "debugger",
      "default", "delete", "do",     "else",     "export", "extends",  "finally",
      "for",    "function", "if",   "import",   "in",     "instanceof", "new",
      "return", "super",  "switch", "this",     "throw",  "try",      "typeof",
      "var",    "void",   "while",  "with",     "yield",  "let",      "static",
      "await",  "null",   "true",   "false",    "undefined", "async", "of"};
  return k.count(word) != 0;
}

}  // namespace imgslim::js
