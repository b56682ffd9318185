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


#include "imgslim/js_analyzer.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "imgslim/error.hpp"
#include "imgslim/js_lexer.hpp"

namespace imgslim {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kVariableDeclarator:
      return "variable-declarator";
    case SourceKind::kAssignment:
      return "assignment";
    case SourceKind::kCallResult:
      return "call-result";
    case SourceKind::kLiteral:
      return "literal";
  }
  return "literal";
}

nlohmann::json TaintPath::to_json() const {
  nlohmann::json step_list = nlohmann::json::array();
  for (const auto& s : steps) step_list.push_back(s.to_string());
  return {{"sink", sink},
          {"sink_location", sink_location.to_string()},
          {"source_kind", to_string(source_kind)},
          {"source_location", source_location.to_string()},
          {"steps", step_list},
          {"resolved_values", resolved_values},
          {"argument_values", argument_values},
          {"uses_shell", uses_shell}};
}

const std::vector<std::string>& default_sinks() {
  static const std::vector<std::string> k = {"exec",     "execSync",  "execFile",
                                             "execFileSync", "spawn", "spawnSync"};
  return k;
}

namespace {

using js::Token;
using js::TokenKind;

constexpr std::size_t kMaxAlternatives = 32;
constexpr int kMaxDepth = 48;
constexpr int kMaxParseDepth = 256;

// ---------------------------------------------------------------------------
// Abstract string values: a union of alternatives, each a sequence of
// constant and unknown parts.

struct Part {
  bool dyn = false;
  std::string text;
};
using Alt = std::vector<Part>;

struct Value {
  std::vector<Alt> alts;

  static Value dynamic() { return Value{{Alt{Part{true, {}}}}}; }
  static Value constant(std::string s) { return Value{{Alt{Part{false, std::move(s)}}}}; }
};

void push_part(Alt& alt, const Part& p) {
  if (!alt.empty() && alt.back().dyn == p.dyn) {
    if (!p.dyn) alt.back().text += p.text;
    return;
  }
  alt.push_back(p);
}

void cap(Value& v) {
  if (v.alts.size() <= kMaxAlternatives) return;
  // Fold the overflow into one alternative that keeps every fragment.
  Alt merged;
  for (std::size_t i = kMaxAlternatives - 1; i < v.alts.size(); ++i) {
    push_part(merged, Part{true, {}});
    for (const auto& p : v.alts[i]) push_part(merged, p);
  }
  v.alts.resize(kMaxAlternatives - 1);
  v.alts.push_back(std::move(merged));
}

Value unite(Value a, const Value& b) {
  for (const auto& alt : b.alts) {
    bool dup = std::any_of(a.alts.begin(), a.alts.end(), [&](const Alt& x) {
      return x.size() == alt.size() &&
             std::equal(x.begin(), x.end(), alt.begin(), [](const Part& p, const Part& q) {
               return p.dyn == q.dyn && p.text == q.text;
             });
    });
    if (!dup) a.alts.push_back(alt);
  }
  cap(a);
  return a;
}

Value concat(const Value& a, const Value& b) {
  Value out;
  for (const auto& x : a.alts) {
    for (const auto& y : b.alts) {
      Alt alt = x;
      for (const auto& p : y) push_part(alt, p);
      out.alts.push_back(std::move(alt));
    }
  }
  cap(out);
  return out;
}

std::vector<std::string> fragments(const Value& v) {
  std::vector<std::string> out;
  for (const auto& alt : v.alts) {
    for (const auto& p : alt) {
      if (p.dyn || p.text.empty()) continue;
      if (std::find(out.begin(), out.end(), p.text) == out.end()) out.push_back(p.text);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expression trees.

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind {
    kStr,
    kNum,
    kTmpl,
    kIdent,
    kBinary,
    kLogical,
    kCond,
    kCall,
    kMember,
    kIndex,
    kArray,
    kFunc,
    kAssign,
    kUnknown
  };
  Kind kind = Kind::kUnknown;
  std::string text;
  std::vector<NodePtr> kids;
  int line = 0;
  // Token index in the file's token stream, used for scope lookup.
  std::size_t pos = 0;
};

NodePtr make(Node::Kind kind, std::string text, std::vector<NodePtr> kids, int line,
             std::size_t pos) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->text = std::move(text);
  n->kids = std::move(kids);
  n->line = line;
  n->pos = pos;
  return n;
}

struct ParseError {};

std::vector<std::size_t> compute_matches(const std::vector<Token>& toks) {
  std::vector<std::size_t> match(toks.size(), toks.size() - 1);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind != TokenKind::kPunct) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      stack.push_back(i);
    } else if (t.text == ")" || t.text == "]" || t.text == "}") {
      if (stack.empty()) continue;
      match[stack.back()] = i;
      match[i] = stack.back();
      stack.pop_back();
    }
  }
  return match;
}

int binary_precedence(const Token& t) {
  if (t.kind == TokenKind::kIdentifier) {
    return (t.text == "instanceof" || t.text == "in") ? 7 : 0;
  }
  if (t.kind != TokenKind::kPunct) return 0;
  static const std::map<std::string, int, std::less<>> k = {
      {"??", 1}, {"||", 1},  {"&&", 2},  {"|", 3},   {"^", 4},   {"&", 5},  {"==", 6},
      {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7},   {">", 7},   {"<=", 7}, {">=", 7},
      {"<<", 8}, {">>", 8},  {">>>", 8}, {"+", 9},   {"-", 9},   {"*", 10}, {"/", 10},
      {"%", 10}, {"**", 11}};
  auto it = k.find(t.text);
  return it == k.end() ? 0 : it->second;
}

bool is_assign_op(const Token& t) {
  static const std::set<std::string, std::less<>> k = {
      "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=",
      "&&=", "||=", "?\?="};
  return t.kind == TokenKind::kPunct && k.count(t.text) != 0;
}

// Precedence-climbing parser over a token range. `fixed_pos` pins every
// node to one position (used for template substitutions, which are parsed
// from their own token stream).
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, const std::vector<std::size_t>& match,
             std::size_t pos, std::optional<std::size_t> fixed_pos = std::nullopt)
      : t_(toks), match_(match), p_(pos), fixed_(fixed_pos) {}

  std::size_t pos() const { return p_; }

  NodePtr expression() {
    NodePtr n = assignment();
    while (cur().punct(",")) {
      ++p_;
      n = assignment();
    }
    return n;
  }

  NodePtr assignment() {
    Guard g(this);
    if (arrow_ahead()) return arrow();
    NodePtr lhs = conditional();
    if (is_assign_op(cur())) {
      std::string op = cur().text;
      std::size_t at = p_++;
      NodePtr rhs = assignment();
      return make(Node::Kind::kAssign, op, {lhs, rhs}, t_[at].line, where(at));
    }
    return lhs;
  }

 private:
  struct Guard {
    explicit Guard(ExprParser* p) : parser(p) {
      if (++parser->depth_ > kMaxParseDepth) throw ParseError{};
    }
    ~Guard() { --parser->depth_; }
    ExprParser* parser;
  };

  const Token& cur() const { return t_[std::min(p_, t_.size() - 1)]; }
  const Token& at(std::size_t k) const { return t_[std::min(k, t_.size() - 1)]; }
  std::size_t where(std::size_t k) const { return fixed_ ? *fixed_ : k; }

  void expect(std::string_view punct) {
    if (!cur().punct(punct)) throw ParseError{};
    ++p_;
  }

  std::size_t close_of(std::size_t k) const {
    if (match_[k] <= k) throw ParseError{};
    return match_[k];
  }

  bool arrow_ahead() const {
    std::size_t k = p_;
    if (at(k).ident("async") && !at(k + 1).punct("=>")) ++k;
    if (at(k).kind == TokenKind::kIdentifier && at(k + 1).punct("=>")) return true;
    if (at(k).punct("(") && match_[k] > k && at(match_[k] + 1).punct("=>")) return true;
    return false;
  }

  NodePtr arrow() {
    std::size_t start = p_;
    if (cur().ident("async") && !at(p_ + 1).punct("=>")) ++p_;
    p_ = cur().punct("(") ? close_of(p_) + 1 : p_ + 1;
    expect("=>");
    if (cur().punct("{")) {
      p_ = close_of(p_) + 1;
    } else {
      assignment();
    }
    return make(Node::Kind::kFunc, "", {}, t_[start].line, where(start));
  }

  NodePtr conditional() {
    NodePtr c = binary(0);
    if (cur().punct("?")) {
      ++p_;
      NodePtr a = assignment();
      expect(":");
      NodePtr b = assignment();
      return make(Node::Kind::kCond, "?", {c, a, b}, c->line, c->pos);
    }
    return c;
  }

  NodePtr binary(int min_prec) {
    Guard g(this);
    NodePtr left = unary();
    while (true) {
      int prec = binary_precedence(cur());
      if (prec <= min_prec) return left;
      std::string op = cur().text;
      std::size_t at_op = p_++;
      NodePtr right = binary(op == "**" ? prec - 1 : prec);
      Node::Kind kind = (op == "||" || op == "&&" || op == "??") ? Node::Kind::kLogical
                                                                  : Node::Kind::kBinary;
      left = make(kind, op, {left, right}, t_[at_op].line, where(at_op));
    }
  }

  NodePtr unary() {
    Guard g(this);
    const Token& t = cur();
    std::size_t start = p_;
    bool op = (t.kind == TokenKind::kPunct &&
               (t.text == "!" || t.text == "-" || t.text == "+" || t.text == "~" ||
                t.text == "++" || t.text == "--")) ||
              t.ident("typeof") || t.ident("void") || t.ident("delete") || t.ident("await");
    if (op) {
      std::string text = t.text;
      ++p_;
      NodePtr operand = unary();
      if (text == "-" && operand->kind == Node::Kind::kNum) {
        return make(Node::Kind::kNum, "-" + operand->text, {}, operand->line, operand->pos);
      }
      if (text == "await") return operand;
      return make(Node::Kind::kUnknown, text, {operand}, t_[start].line, where(start));
    }
    if (t.ident("new")) {
      ++p_;
      if (cur().punct(".")) {  // new.target
        p_ += 2;
        return make(Node::Kind::kUnknown, "new", {}, t_[start].line, where(start));
      }
      NodePtr callee = postfix(primary(), /*allow_call=*/false);
      std::vector<NodePtr> args;
      if (cur().punct("(")) args = arguments();
      NodePtr n = make(Node::Kind::kUnknown, "new", {callee}, t_[start].line, where(start));
      return postfix(n, true);
    }
    return postfix(primary(), true);
  }

  std::vector<NodePtr> arguments() {
    expect("(");
    std::vector<NodePtr> args;
    while (!cur().punct(")")) {
      if (cur().kind == TokenKind::kEnd) throw ParseError{};
      if (cur().punct("...")) {
        std::size_t s = p_++;
        assignment();
        args.push_back(make(Node::Kind::kUnknown, "...", {}, t_[s].line, where(s)));
      } else {
        args.push_back(assignment());
      }
      if (!cur().punct(",")) break;
      ++p_;
    }
    expect(")");
    return args;
  }

  NodePtr postfix(NodePtr n, bool allow_call) {
    while (true) {
      const Token& t = cur();
      std::size_t start = p_;
      if (t.punct(".") || (t.punct("?.") && at(p_ + 1).kind == TokenKind::kIdentifier)) {
        ++p_;
        if (cur().punct("#")) ++p_;
        if (cur().kind != TokenKind::kIdentifier) throw ParseError{};
        std::string name = cur().text;
        ++p_;
        n = make(Node::Kind::kMember, name, {n}, t_[start].line, where(start));
      } else if (t.punct("?.") && at(p_ + 1).punct("[")) {
        ++p_;
      } else if (t.punct("?.") && at(p_ + 1).punct("(")) {
        ++p_;
      } else if (t.punct("[")) {
        ++p_;
        NodePtr idx = expression();
        expect("]");
        n = make(Node::Kind::kIndex, "[]", {n, idx}, t_[start].line, where(start));
      } else if (t.punct("(") && allow_call) {
        std::vector<NodePtr> kids{n};
        for (auto& a : arguments()) kids.push_back(std::move(a));
        n = make(Node::Kind::kCall, "()", std::move(kids), t_[start].line, where(start));
      } else if (t.kind == TokenKind::kTemplate) {
        ++p_;
        n = make(Node::Kind::kUnknown, "tagged", {}, t_[start].line, where(start));
      } else if ((t.punct("++") || t.punct("--")) && at(p_ - 1).line == t.line) {
        ++p_;
        n = make(Node::Kind::kUnknown, t.text, {}, t_[start].line, where(start));
      } else {
        return n;
      }
    }
  }

  NodePtr primary() {
    Guard g(this);
    const Token& t = cur();
    std::size_t start = p_;
    int line = t.line;
    switch (t.kind) {
      case TokenKind::kString:
        ++p_;
        return make(Node::Kind::kStr, t.text, {}, line, where(start));
      case TokenKind::kNumber:
        ++p_;
        return make(Node::Kind::kNum, t.text, {}, line, where(start));
      case TokenKind::kTemplate: {
        ++p_;
        std::vector<NodePtr> kids;
        for (std::size_t i = 0; i < t.quasis.size(); ++i) {
          kids.push_back(make(Node::Kind::kStr, t.quasis[i], {}, line, where(start)));
          if (i < t.expressions.size()) kids.push_back(substitution(t, i, where(start)));
        }
        return make(Node::Kind::kTmpl, "`", std::move(kids), line, where(start));
      }
      case TokenKind::kRegex:
        ++p_;
        return make(Node::Kind::kUnknown, "regex", {}, line, where(start));
      case TokenKind::kEnd:
        throw ParseError{};
      case TokenKind::kIdentifier:
        return identifier();
      case TokenKind::kPunct:
        break;
    }
    if (t.punct("(")) {
      ++p_;
      NodePtr n = expression();
      expect(")");
      return n;
    }
    if (t.punct("[")) {
      ++p_;
      std::vector<NodePtr> elems;
      while (!cur().punct("]")) {
        if (cur().kind == TokenKind::kEnd) throw ParseError{};
        if (cur().punct(",")) {
          elems.push_back(make(Node::Kind::kUnknown, "hole", {}, cur().line, where(p_)));
          ++p_;
          continue;
        }
        if (cur().punct("...")) {
          std::size_t s = p_++;
          assignment();
          elems.push_back(make(Node::Kind::kUnknown, "...", {}, t_[s].line, where(s)));
        } else {
          elems.push_back(assignment());
        }
        if (!cur().punct(",")) break;
        ++p_;
      }
      expect("]");
      return make(Node::Kind::kArray, "[]", std::move(elems), line, where(start));
    }
    if (t.punct("{")) {
      p_ = close_of(p_) + 1;
      return make(Node::Kind::kUnknown, "object", {}, line, where(start));
    }
    if (t.punct("#")) {
      p_ += 2;
      return make(Node::Kind::kUnknown, "private", {}, line, where(start));
    }
    throw ParseError{};
  }

  NodePtr identifier() {
    const Token& t = cur();
    std::size_t start = p_;
    int line = t.line;
    if (t.text == "function" || (t.text == "async" && at(p_ + 1).ident("function"))) {
      if (t.text == "async") ++p_;
      ++p_;
      if (cur().punct("*")) ++p_;
      if (cur().kind == TokenKind::kIdentifier) ++p_;
      if (!cur().punct("(")) throw ParseError{};
      p_ = close_of(p_) + 1;
      if (!cur().punct("{")) throw ParseError{};
      p_ = close_of(p_) + 1;
      return make(Node::Kind::kFunc, "", {}, line, where(start));
    }
    if (t.text == "class") {
      ++p_;
      while (!cur().punct("{")) {
        if (cur().kind == TokenKind::kEnd) throw ParseError{};
        ++p_;
      }
      p_ = close_of(p_) + 1;
      return make(Node::Kind::kUnknown, "class", {}, line, where(start));
    }
    ++p_;
    if (t.text == "true" || t.text == "false" || t.text == "null" || t.text == "undefined" ||
        t.text == "this" || t.text == "super") {
      return make(Node::Kind::kUnknown, t.text, {}, line, where(start));
    }
    return make(Node::Kind::kIdent, t.text, {}, line, where(start));
  }

  NodePtr substitution(const Token& tmpl, std::size_t i, std::size_t pos) const {
    try {
      auto toks = js::tokenize(tmpl.expressions[i], tmpl.expression_lines[i]);
      auto match = compute_matches(toks);
      ExprParser sub(toks, match, 0, pos);
      NodePtr n = sub.expression();
      if (toks[sub.pos()].kind != TokenKind::kEnd) throw ParseError{};
      return n;
    } catch (const ParseError&) {
    } catch (const FormatError&) {
    }
    return make(Node::Kind::kUnknown, "${}", {}, tmpl.expression_lines[i], pos);
  }

  const std::vector<Token>& t_;
  const std::vector<std::size_t>& match_;
  std::size_t p_;
  std::optional<std::size_t> fixed_;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Module model: functions, definitions, call sites, sinks.

struct Function {
  std::string name;
  std::size_t begin = 0;  // first token of the parameter list
  std::size_t end = 0;    // last token of the body
  int parent = -1;
  std::vector<std::string> params;
  std::vector<NodePtr> defaults;  // parallel to params; may be null
  std::vector<std::pair<NodePtr, int>> returns;
  std::size_t params_open = 0, params_close = 0;
  std::size_t body_begin = 0;
  bool expression_body = false;
};

struct Def {
  enum class Kind { kDeclarator, kAssignment, kAppend, kParam, kDynamic };
  Kind kind = Kind::kDynamic;
  NodePtr expr;
  int line = 0;
  std::size_t param_index = 0;
};

struct CallSite {
  int scope = -1;
  std::vector<NodePtr> args;
};

struct TraceStep {
  SourceKind kind;
  int line;
};

class Module {
 public:
  Module(std::string_view source, std::string file, const std::vector<std::string>& sinks)
      : file_(std::move(file)), sinks_(sinks.begin(), sinks.end()) {
    toks_ = js::tokenize(source);
    match_ = compute_matches(toks_);
    scan_functions();
    assign_scopes();
    collect();
  }

  std::vector<TaintPath> sink_paths() {
    std::vector<TaintPath> out;
    for (const auto& s : sink_sites_) out.push_back(resolve_sink(s));
    return out;
  }

 private:
  struct SinkSite {
    std::string name;
    std::size_t pos;
    std::vector<NodePtr> args;
  };

  using Key = std::pair<int, std::string>;

  const Token& at(std::size_t k) const { return toks_[std::min(k, toks_.size() - 1)]; }

  bool member_access_before(std::size_t i) const {
    return i > 0 && (at(i - 1).punct(".") || at(i - 1).punct("?."));
  }

  // ---- functions --------------------------------------------------------

  std::string inferred_name(std::size_t before) const {
    // `name = function`, `name: function`, `const name = (...) =>`.
    if (before == 0) return {};
    std::size_t k = before - 1;
    if (at(k).ident("async") && k > 0) --k;
    if ((at(k).punct("=") || at(k).punct(":")) && k > 0 &&
        at(k - 1).kind == TokenKind::kIdentifier && !member_access_before(k - 1)) {
      return at(k - 1).text;
    }
    return {};
  }

  void add_function(Function f) {
    if (f.end <= f.begin || f.end >= toks_.size()) return;
    functions_.push_back(std::move(f));
  }

  void scan_functions() {
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.ident("function") && !member_access_before(i)) {
        std::size_t j = i + 1;
        if (at(j).punct("*")) ++j;
        Function f;
        if (at(j).kind == TokenKind::kIdentifier) {
          f.name = at(j).text;
          ++j;
        } else {
          f.name = inferred_name(i);
        }
        if (!at(j).punct("(") || match_[j] <= j) continue;
        std::size_t body = match_[j] + 1;
        if (!at(body).punct("{") || match_[body] <= body) continue;
        f.params_open = j;
        f.params_close = match_[j];
        f.begin = j;
        f.body_begin = body;
        f.end = match_[body];
        add_function(std::move(f));
      } else if (t.punct("=>") && i > 0) {
        Function f;
        if (at(i - 1).kind == TokenKind::kIdentifier) {
          f.begin = i - 1;
          f.params_open = f.params_close = i - 1;
        } else if (at(i - 1).punct(")") && match_[i - 1] < i - 1) {
          f.begin = match_[i - 1];
          f.params_open = f.begin;
          f.params_close = i - 1;
        } else {
          continue;
        }
        f.name = inferred_name(f.begin);
        f.body_begin = i + 1;
        if (at(i + 1).punct("{") && match_[i + 1] > i + 1) {
          f.end = match_[i + 1];
        } else {
          f.expression_body = true;
          std::size_t k = i + 1;
          while (k < toks_.size() - 1) {
            const Token& c = toks_[k];
            if (c.punct("(") || c.punct("[") || c.punct("{")) {
              k = std::max(match_[k], k) + 1;
              continue;
            }
            if (c.punct(",") || c.punct(";") || c.punct(")") || c.punct("]") || c.punct("}")) {
              break;
            }
            ++k;
          }
          if (k == i + 1) continue;
          f.end = k - 1;
        }
        add_function(std::move(f));
      } else if (t.kind == TokenKind::kIdentifier && !js::is_reserved_word(t.text) &&
                 at(i + 1).punct("(") && match_[i + 1] > i + 1 &&
                 at(match_[i + 1] + 1).punct("{") && method_position(i)) {
        Function f;
        f.name = t.text;
        f.params_open = i + 1;
        f.params_close = match_[i + 1];
        f.begin = i + 1;
        f.body_begin = match_[i + 1] + 1;
        f.end = match_[f.body_begin];
        method_names_.insert(i);
        add_function(std::move(f));
      }
    }
    std::stable_sort(functions_.begin(), functions_.end(),
                     [](const Function& a, const Function& b) { return a.begin < b.begin; });
  }

  bool method_position(std::size_t i) const {
    if (i == 0) return false;
    const Token& p = at(i - 1);
    if (p.punct("{") || p.punct("}") || p.punct(",") || p.punct(";") || p.punct("*")) {
      return true;
    }
    return p.ident("static") || p.ident("async") || p.ident("get") || p.ident("set");
  }

  void assign_scopes() {
    scope_of_.assign(toks_.size(), -1);
    for (std::size_t f = 0; f < functions_.size(); ++f) {
      const Function& fn = functions_[f];
      functions_[f].parent = scope_of_[fn.begin];
      for (std::size_t k = fn.begin; k <= fn.end; ++k) scope_of_[k] = static_cast<int>(f);
    }
    for (std::size_t f = 0; f < functions_.size(); ++f) {
      Function& fn = functions_[f];
      if (!fn.name.empty()) {
        // A declaration's name lives in the enclosing scope.
        functions_by_name_[fn.name].push_back(static_cast<int>(f));
      }
      collect_params(static_cast<int>(f));
    }
  }

  void collect_params(int f) {
    Function& fn = functions_[f];
    auto bind = [&](const std::string& name, NodePtr def_expr, int line) {
      Def d;
      d.kind = Def::Kind::kParam;
      d.param_index = fn.params.size();
      d.line = line;
      fn.params.push_back(name);
      fn.defaults.push_back(def_expr);
      defs_[{f, name}].push_back(d);
    };
    if (fn.params_open == fn.params_close) {
      bind(at(fn.params_open).text, nullptr, at(fn.params_open).line);
      return;
    }
    std::size_t k = fn.params_open + 1;
    while (k < fn.params_close) {
      const Token& t = at(k);
      if (t.punct("...")) {
        ++k;
        continue;
      }
      if (t.punct("{") || t.punct("[")) {
        std::size_t close = match_[k];
        for (std::size_t j = k + 1; j < close; ++j) {
          if (at(j).kind == TokenKind::kIdentifier && !at(j + 1).punct(":")) {
            Def d;
            d.line = at(j).line;
            defs_[{f, at(j).text}].push_back(d);
          }
        }
        // Placeholder keeps positional binding aligned.
        fn.params.emplace_back();
        fn.defaults.emplace_back();
        k = close + 1;
      } else if (t.kind == TokenKind::kIdentifier) {
        NodePtr def_expr;
        std::size_t next = k + 1;
        if (at(k + 1).punct("=")) {
          try {
            ExprParser p(toks_, match_, k + 2);
            def_expr = p.assignment();
            next = p.pos();
          } catch (const ParseError&) {
            next = k + 2;
          }
        }
        bind(t.text, def_expr, t.line);
        k = next;
      } else {
        ++k;
        continue;
      }
      while (k < fn.params_close && !at(k).punct(",")) {
        k = (at(k).punct("(") || at(k).punct("[") || at(k).punct("{")) ? match_[k] + 1 : k + 1;
      }
      ++k;
    }
  }

  // ---- linear collection pass -----------------------------------------

  std::optional<NodePtr> parse_at(std::size_t pos, std::size_t* end = nullptr) {
    try {
      ExprParser p(toks_, match_, pos);
      NodePtr n = p.assignment();
      if (end != nullptr) *end = p.pos();
      return n;
    } catch (const ParseError&) {
      return std::nullopt;
    }
  }

  void add_def(int scope, const std::string& name, Def d) {
    defs_[{scope, name}].push_back(std::move(d));
  }

  void collect() {
    std::set<std::size_t> declared;
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      const Token& t = toks_[i];
      int scope = scope_of_[i];
      if (t.kind != TokenKind::kIdentifier) continue;
      bool member = member_access_before(i);

      if (!member && (t.text == "var" || t.text == "let" || t.text == "const")) {
        declarators(i + 1, declared);
        continue;
      }
      if (!member && t.text == "return" && scope >= 0) {
        if (!at(i + 1).punct(";") && !at(i + 1).punct("}") && at(i + 1).line == t.line &&
            at(i + 1).kind != TokenKind::kEnd) {
          if (auto n = parse_at(i + 1)) functions_[scope].returns.push_back({*n, t.line});
        }
        continue;
      }
      if (!member && declared.count(i) == 0 && !js::is_reserved_word(t.text) &&
          is_assign_op(at(i + 1)) && !in_param_list(i)) {
        const std::string& op = at(i + 1).text;
        if (auto n = parse_at(i + 2)) {
          Def d;
          d.line = t.line;
          d.expr = *n;
          if (op == "=" || op == "||=" || op == "?\?=" || op == "&&=") {
            d.kind = Def::Kind::kAssignment;
          } else if (op == "+=") {
            d.kind = Def::Kind::kAppend;
          } else {
            d.kind = Def::Kind::kDynamic;
          }
          add_def(binding_scope(scope, t.text), t.text, d);
        }
      }
      if (at(i + 1).punct("(") && !js::is_reserved_word(t.text) && method_names_.count(i) == 0 &&
          !(i > 0 && at(i - 1).ident("function"))) {
        std::vector<NodePtr> args = call_arguments(i);
        if (sinks_.count(t.text) && !regex_receiver(i)) {
          sink_sites_.push_back({t.text, i, args});
        }
        if (!member) calls_[t.text].push_back({scope, std::move(args)});
      }
    }
    // Expression-bodied arrows return their body.
    for (auto& fn : functions_) {
      if (!fn.expression_body) continue;
      if (auto n = parse_at(fn.body_begin)) fn.returns.push_back({*n, at(fn.body_begin).line});
    }
  }

  bool regex_receiver(std::size_t i) const {
    return i >= 2 && at(i - 1).punct(".") && at(i - 2).kind == TokenKind::kRegex;
  }

  bool in_param_list(std::size_t i) const {
    int s = scope_of_[i];
    while (s >= 0) {
      const Function& fn = functions_[s];
      if (i >= fn.params_open && i <= fn.params_close) return true;
      s = fn.parent;
    }
    return false;
  }

  // Scope that owns `name` as seen from `scope`; module scope when unbound.
  int binding_scope(int scope, const std::string& name) const {
    for (int s = scope; s >= 0; s = functions_[s].parent) {
      if (defs_.count({s, name})) return s;
    }
    return -1;
  }

  std::vector<NodePtr> call_arguments(std::size_t callee) {
    std::size_t open = callee + 1;
    std::vector<NodePtr> args;
    if (match_[open] <= open) return args;
    std::size_t k = open + 1;
    while (k < match_[open]) {
      std::size_t end = k;
      auto n = parse_at(k, &end);
      if (!n || end <= k) return args;
      args.push_back(*n);
      if (!at(end).punct(",")) break;
      k = end + 1;
    }
    return args;
  }

  void declarators(std::size_t k, std::set<std::size_t>& declared) {
    int scope = scope_of_[k > 0 ? k - 1 : 0];
    while (k < toks_.size() - 1) {
      const Token& t = at(k);
      if (t.kind == TokenKind::kIdentifier) {
        declared.insert(k);
        Def d;
        d.line = t.line;
        if (at(k + 1).ident("of") || at(k + 1).ident("in")) {
          add_def(scope, t.text, d);
          return;
        }
        if (at(k + 1).punct("=")) {
          std::size_t end = k + 2;
          auto n = parse_at(k + 2, &end);
          if (!n) {
            add_def(scope, t.text, d);
            return;
          }
          d.kind = Def::Kind::kDeclarator;
          d.expr = *n;
          add_def(scope, t.text, d);
          k = end;
        } else {
          k = k + 1;
        }
      } else if ((t.punct("{") || t.punct("[")) && match_[k] > k) {
        std::size_t close = match_[k];
        for (std::size_t j = k + 1; j < close; ++j) {
          if (at(j).kind == TokenKind::kIdentifier && !at(j + 1).punct(":") &&
              !member_access_before(j)) {
            declared.insert(j);
            Def d;
            d.line = at(j).line;
            add_def(scope, at(j).text, d);
          }
        }
        k = close + 1;
        if (at(k).punct("=")) {
          std::size_t end = k + 1;
          if (!parse_at(k + 1, &end)) return;
          k = end;
        }
      } else {
        return;
      }
      if (!at(k).punct(",")) return;
      ++k;
    }
  }

  // ---- evaluation -------------------------------------------------------

  struct Ctx {
    int scope = -1;
    int env_fn = -2;
    const std::map<std::string, Value>* env = nullptr;
    bool bind_params = true;
    int depth = 0;
  };

  Ctx deeper(Ctx c) const {
    ++c.depth;
    return c;
  }

  Value eval(const NodePtr& n, const Ctx& ctx) {
    if (!n || ctx.depth > kMaxDepth) return Value::dynamic();
    Ctx c = deeper(ctx);
    switch (n->kind) {
      case Node::Kind::kStr:
      case Node::Kind::kNum:
        return Value::constant(n->text);
      case Node::Kind::kTmpl: {
        Value v = Value::constant("");
        for (const auto& k : n->kids) v = concat(v, eval(k, c));
        return v;
      }
      case Node::Kind::kIdent:
        return lookup(n->text, c);
      case Node::Kind::kBinary:
        if (n->text == "+") return concat(eval(n->kids[0], c), eval(n->kids[1], c));
        return Value::dynamic();
      case Node::Kind::kLogical:
        if (n->text == "&&") return unite(eval(n->kids[1], c), Value::dynamic());
        return unite(eval(n->kids[0], c), eval(n->kids[1], c));
      case Node::Kind::kCond:
        return unite(eval(n->kids[1], c), eval(n->kids[2], c));
      case Node::Kind::kAssign:
        return eval(n->kids[1], c);
      case Node::Kind::kCall:
        return eval_call(*n, c);
      default:
        return Value::dynamic();
    }
  }

  Value lookup(const std::string& name, const Ctx& ctx) {
    for (int s = ctx.scope;; s = functions_[s].parent) {
      auto it = defs_.find({s, name});
      if (it != defs_.end()) return eval_defs(s, name, it->second, ctx);
      if (s < 0) break;
    }
    return Value::dynamic();
  }

  Value eval_defs(int scope, const std::string& name, const std::vector<Def>& defs,
                  const Ctx& ctx) {
    auto key = std::make_tuple(scope, name, ctx.env_fn == scope ? ctx.env : nullptr);
    if (active_.count(key)) return Value::dynamic();
    active_.insert(key);
    Ctx c = ctx;
    c.scope = scope;
    Value out;
    Value base;
    bool have_base = false;
    for (const auto& d : defs) {
      switch (d.kind) {
        case Def::Kind::kDeclarator:
        case Def::Kind::kAssignment: {
          trace_.push_back({d.kind == Def::Kind::kDeclarator ? SourceKind::kVariableDeclarator
                                                              : SourceKind::kAssignment,
                            d.line});
          Value v = eval(d.expr, c);
          base = have_base ? unite(base, v) : v;
          have_base = true;
          break;
        }
        case Def::Kind::kParam: {
          Value v = param_value(scope, d, name, ctx);
          base = have_base ? unite(base, v) : v;
          have_base = true;
          break;
        }
        case Def::Kind::kDynamic:
          base = have_base ? unite(base, Value::dynamic()) : Value::dynamic();
          have_base = true;
          break;
        case Def::Kind::kAppend:
          break;
      }
    }
    out = have_base ? base : Value::dynamic();
    for (const auto& d : defs) {
      if (d.kind != Def::Kind::kAppend) continue;
      trace_.push_back({SourceKind::kAssignment, d.line});
      out = unite(out, concat(have_base ? base : Value::dynamic(), eval(d.expr, c)));
    }
    active_.erase(key);
    return out;
  }

  Value param_value(int fn, const Def& d, const std::string& name, const Ctx& ctx) {
    const Function& f = functions_[fn];
    if (ctx.env_fn == fn && ctx.env != nullptr) {
      auto it = ctx.env->find(name);
      if (it != ctx.env->end()) return it->second;
    }
    Value fallback = f.defaults[d.param_index] ? eval(f.defaults[d.param_index], ctx)
                                               : Value::dynamic();
    if (!ctx.bind_params || f.name.empty()) return fallback;
    auto calls = calls_.find(f.name);
    if (calls == calls_.end() || calls->second.empty()) return fallback;
    Value out;
    bool first = true;
    for (const auto& site : calls->second) {
      Ctx c;
      c.scope = site.scope;
      c.bind_params = false;
      c.depth = ctx.depth + 1;
      Value v = d.param_index < site.args.size() ? eval(site.args[d.param_index], c) : fallback;
      out = first ? v : unite(out, v);
      first = false;
    }
    return out;
  }

  std::optional<std::vector<NodePtr>> array_elements(const NodePtr& n, const Ctx& ctx) const {
    if (n->kind == Node::Kind::kArray) return n->kids;
    if (n->kind != Node::Kind::kIdent) return std::nullopt;
    for (int s = ctx.scope;; s = functions_[s].parent) {
      auto it = defs_.find({s, n->text});
      if (it != defs_.end()) {
        if (it->second.size() == 1 && it->second[0].kind == Def::Kind::kDeclarator &&
            it->second[0].expr->kind == Node::Kind::kArray) {
          return it->second[0].expr->kids;
        }
        return std::nullopt;
      }
      if (s < 0) break;
    }
    return std::nullopt;
  }

  Value eval_call(const Node& n, const Ctx& ctx) {
    const NodePtr& callee = n.kids[0];
    std::vector<NodePtr> args(n.kids.begin() + 1, n.kids.end());
    if (callee->kind == Node::Kind::kMember) {
      const std::string& method = callee->text;
      const NodePtr& obj = callee->kids[0];
      if (method == "join") {
        auto elems = array_elements(obj, ctx);
        if (!elems) return Value::dynamic();
        Value sep = args.empty() ? Value::constant(",") : eval(args[0], ctx);
        Value v = Value::constant("");
        for (std::size_t i = 0; i < elems->size(); ++i) {
          if (i > 0) v = concat(v, sep);
          v = concat(v, eval((*elems)[i], ctx));
        }
        return v;
      }
      if (method == "toString" || method == "trim" || method == "valueOf") return eval(obj, ctx);
      if (method == "concat") {
        Value v = eval(obj, ctx);
        for (const auto& a : args) v = concat(v, eval(a, ctx));
        return v;
      }
      return Value::dynamic();
    }
    if (callee->kind != Node::Kind::kIdent) return Value::dynamic();
    if (callee->text == "String" && !args.empty()) return eval(args[0], ctx);
    auto fns = functions_by_name_.find(callee->text);
    if (fns == functions_by_name_.end()) return Value::dynamic();

    Value out;
    bool any = false;
    for (int f : fns->second) {
      if (active_fns_.count(f)) continue;
      const Function& fn = functions_[f];
      std::map<std::string, Value> env;
      for (std::size_t i = 0; i < fn.params.size(); ++i) {
        if (fn.params[i].empty()) continue;
        if (i < args.size()) {
          env[fn.params[i]] = eval(args[i], ctx);
        } else {
          env[fn.params[i]] = fn.defaults[i] ? eval(fn.defaults[i], ctx) : Value::dynamic();
        }
      }
      active_fns_.insert(f);
      Ctx c;
      c.scope = f;
      c.env_fn = f;
      c.env = &env;
      c.bind_params = ctx.bind_params;
      c.depth = ctx.depth + 1;
      for (const auto& [expr, line] : fn.returns) {
        trace_.push_back({SourceKind::kCallResult, line});
        Value v = eval(expr, c);
        out = any ? unite(out, v) : v;
        any = true;
      }
      active_fns_.erase(f);
    }
    return any ? out : Value::dynamic();
  }

  TaintPath resolve_sink(const SinkSite& s) {
    TaintPath path;
    path.sink = s.name;
    path.sink_location = {file_, at(s.pos).line};
    path.source_location = path.sink_location;
    path.uses_shell = s.name == "exec" || s.name == "execSync";
    if (s.args.empty()) return path;
    trace_.clear();
    active_.clear();
    active_fns_.clear();
    Ctx ctx;
    ctx.scope = scope_of_[s.pos];
    path.resolved_values = fragments(eval(s.args[0], ctx));
    if (!trace_.empty()) {
      path.source_kind = trace_.back().kind;
      path.source_location = {file_, trace_.back().line};
      for (auto it = trace_.rbegin(); it != trace_.rend(); ++it) {
        SourceLocation loc{file_, it->line};
        if (std::find(path.steps.begin(), path.steps.end(), loc) == path.steps.end()) {
          path.steps.push_back(loc);
        }
      }
    }
    if (!path.uses_shell && s.args.size() > 1) {
      if (auto elems = array_elements(s.args[1], ctx)) {
        for (const auto& e : *elems) {
          for (auto& f : fragments(eval(e, ctx))) path.argument_values.push_back(std::move(f));
        }
      }
    }
    return path;
  }

  std::string file_;
  std::set<std::string> sinks_;
  std::vector<Token> toks_;
  std::vector<std::size_t> match_;
  std::vector<Function> functions_;
  std::vector<int> scope_of_;
  std::set<std::size_t> method_names_;
  std::map<std::string, std::vector<int>> functions_by_name_;
  std::map<Key, std::vector<Def>> defs_;
  std::map<std::string, std::vector<CallSite>> calls_;
  std::vector<SinkSite> sink_sites_;

  std::vector<TraceStep> trace_;
  std::set<std::tuple<int, std::string, const void*>> active_;
  std::set<int> active_fns_;
};

}  // namespace

std::vector<TaintPath> analyze_source(std::string_view source, const std::string& file,
                                      const std::vector<std::string>& sinks) {
  Module m(source, file, sinks);
  return m.sink_paths();
}

}  // namespace imgslim
