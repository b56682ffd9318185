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


#include "imgslim/shell_tokenizer.hpp"

#include <cctype>

namespace imgslim {

namespace {

bool is_separator(char c) {
  switch (c) {
    case ';':
    case '&':
    case '|':
    case '(':
    case ')':
    case '<':
    case '>':
    case '`':
    case '\n':
      return true;
    default:
      return false;
  }
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view s) : s_(s) {}

  ShellTokens run() {
    if (s_.starts_with("#!")) {
      auto end = s_.find('\n');
      std::string_view line = s_.substr(2, end == std::string_view::npos ? s_.size() - 2 : end - 2);
      for (auto& w : split_whitespace(line)) out_.words.push_back({std::move(w), 1});
      i_ = end == std::string_view::npos ? s_.size() : end;
    }
    while (i_ < s_.size()) step();
    flush();
    return std::move(out_);
  }

 private:
  void step() {
    char c = s_[i_];
    if (c == '\n') {
      flush();
      ++line_;
      ++i_;
      return;
    }
    if (is_blank(c)) {
      flush();
      ++i_;
      return;
    }
    if (c == '#' && !in_word_) {
      while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      return;
    }
    if (is_separator(c)) {
      flush();
      ++i_;
      return;
    }
    if (!in_word_) word_line_ = line_;
    if (c == '\\') {
      if (i_ + 1 < s_.size()) {
        if (s_[i_ + 1] == '\n') {
          ++line_;
        } else {
          append(s_[i_ + 1]);
        }
      }
      i_ += 2;
      return;
    }
    if (c == '\'') {
      ++i_;
      single_quoted();
      return;
    }
    if (c == '"') {
      ++i_;
      double_quoted();
      return;
    }
    if (c == '$') {
      dollar(false);
      return;
    }
    append(c);
    ++i_;
  }

  void single_quoted() {
    quoted_ = true;
    in_word_ = true;
    while (i_ < s_.size() && s_[i_] != '\'') {
      if (s_[i_] == '\n') ++line_;
      word_ += s_[i_++];
    }
    ++i_;
  }

  void double_quoted() {
    quoted_ = true;
    in_word_ = true;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_];
      if (c == '\\' && i_ + 1 < s_.size() &&
          (s_[i_ + 1] == '"' || s_[i_ + 1] == '\\' || s_[i_ + 1] == '$' || s_[i_ + 1] == '`')) {
        word_ += s_[i_ + 1];
        i_ += 2;
        continue;
      }
      if (c == '$') {
        dollar(true);
        continue;
      }
      if (c == '`') {
        dynamic_ = true;
        ++i_;
        continue;
      }
      if (c == '\n') ++line_;
      word_ += c;
      ++i_;
    }
    ++i_;
  }

  // Handles the text starting at a '$'.
  void dollar(bool in_double_quotes) {
    std::size_t n = i_ + 1;
    char next = n < s_.size() ? s_[n] : '\0';
    if (next == '(' && !in_double_quotes) {
      // Command substitution: its words are ordinary words.
      flush();
      i_ = n + 1;
      return;
    }
    if (next == '\'' && !in_double_quotes) {
      i_ = n + 1;
      single_quoted();
      return;
    }
    if (next == '{') {
      dynamic_ = true;
      in_word_ = true;
      int depth = 0;
      for (i_ = n; i_ < s_.size(); ++i_) {
        if (s_[i_] == '{') ++depth;
        if (s_[i_] == '}' && --depth == 0) break;
      }
      ++i_;
      return;
    }
    if (next == '(') {
      // "$(...)" inside double quotes stays dynamic.
      dynamic_ = true;
      in_word_ = true;
      int depth = 0;
      for (i_ = n; i_ < s_.size(); ++i_) {
        if (s_[i_] == '(') ++depth;
        if (s_[i_] == ')' && --depth == 0) break;
      }
      ++i_;
      return;
    }
    if (is_name_char(next)) {
      dynamic_ = true;
      in_word_ = true;
      if (std::isdigit(static_cast<unsigned char>(next))) {
        i_ = n + 1;
      } else {
        for (i_ = n; i_ < s_.size() && is_name_char(s_[i_]); ++i_) {
        }
      }
      return;
    }
    if (next == '@' || next == '*' || next == '#' || next == '?' || next == '$' ||
        next == '!' || next == '-') {
      dynamic_ = true;
      in_word_ = true;
      i_ = n + 1;
      return;
    }
    append('$');
    ++i_;
  }

  void append(char c) {
    word_ += c;
    in_word_ = true;
  }

  void flush() {
    if (!in_word_) return;
    if (dynamic_) {
      out_.unresolved_lines.push_back(line_);
    } else if (quoted_) {
      for (auto& w : split_whitespace(word_)) out_.words.push_back({std::move(w), word_line_});
    } else if (!word_.empty()) {
      out_.words.push_back({word_, word_line_});
    }
    word_.clear();
    in_word_ = false;
    quoted_ = false;
    dynamic_ = false;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int word_line_ = 1;
  std::string word_;
  bool in_word_ = false;
  bool quoted_ = false;
  bool dynamic_ = false;
  ShellTokens out_;
};

}  // namespace

ShellTokens tokenize_shell(std::string_view script) { return Tokenizer(script).run(); }

std::size_t add_shell_tokens(CommandTokenList& ctl, std::string_view script,
                             Provenance provenance, const std::string& file) {
  ShellTokens t = tokenize_shell(script);
  for (auto& w : t.words) ctl.add({std::move(w.text), provenance, {file, w.line}});
  return t.unresolved_lines.size();
}

}  // namespace imgslim
