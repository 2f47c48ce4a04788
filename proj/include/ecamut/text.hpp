// Copyright 2026 The ecamut Authors.
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

// Text <-> model bridge for the four input formats:
//
//   .apl   adaptation policy
//            when LOAD is 'high'
//            if FileServers.size <= 10
//            then utility of addFileServer is 'high'
//   .ctx   context schema
//            property LOAD : int [0,100] levels { low: [0,49], high: [50,100] }
//   .sys   system model
//            state FileServers.size = 0
//            effect addFileServer 'high' => FileServers.size := FileServers.size + 1
//   .flow  context flow, one instance per line: 12,3
//
// Keywords and quoted values are case-insensitive. '#' starts a comment
// running to end of line. CRLF input is accepted; LF is emitted.

#ifndef ECAMUT_TEXT_HPP
#define ECAMUT_TEXT_HPP

#include <charconv>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ecamut/model.hpp"

namespace ecamut {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                           message),
        span_(span),
        message_(message) {}

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

/// A flow file parsed fine but breaks the flow invariants.
class FlowError : public std::runtime_error {
 public:
  explicit FlowError(ValidationReport report)
      : std::runtime_error("invalid context flow:\n" + report.to_string()),
        report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

enum class Tok { Ident, Int, Quoted, Punct, Newline, Error, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, digits, quoted contents or punctuation
  SourceSpan span;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Tokenizes the whole input. Dotted identifiers (cacheHandler.size) are a
/// single Ident token. Newlines are kept as tokens for the line-oriented
/// formats; the policy parser skips them. A lexical error becomes an Error
/// token followed by End, so it is reported in source order by the parser.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t line_start = 0;
  std::size_t i = 0;
  auto span_at = [&](std::size_t start, std::size_t len) {
    return SourceSpan{line, static_cast<int>(start - line_start) + 1, static_cast<int>(len)};
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      out.push_back({Tok::Newline, "\n", span_at(i, 1)});
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      ++i;
      while (i < text.size()) {
        if (ident_char(text[i])) {
          ++i;
        } else if (text[i] == '.' && i + 1 < text.size() && ident_start(text[i + 1])) {
          ++i;
        } else {
          break;
        }
      }
      out.push_back({Tok::Ident, std::string(text.substr(start, i - start)), span_at(start, i - start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Tok::Int, std::string(text.substr(start, i - start)), span_at(start, i - start)});
      continue;
    }
    if (c == '\'') {
      ++i;
      while (i < text.size() && text[i] != '\'' && text[i] != '\n') ++i;
      if (i >= text.size() || text[i] != '\'') {
        out.push_back({Tok::Error, "unterminated quoted value", span_at(start, i - start)});
        break;
      }
      ++i;
      out.push_back({Tok::Quoted, std::string(text.substr(start + 1, i - start - 2)),
                     span_at(start, i - start)});
      continue;
    }
    static constexpr std::string_view two[] = {"==", "!=", "<=", ">=", ":=", "=>"};
    bool matched = false;
    for (auto p : two) {
      if (text.substr(i, 2) == p) {
        out.push_back({Tok::Punct, std::string(p), span_at(i, 2)});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one = "<>=:[]{},+-";
    if (one.find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), span_at(i, 1)});
      ++i;
      continue;
    }
    out.push_back({Tok::Error, std::string("unexpected character '") + c + "'", span_at(i, 1)});
    break;
  }
  out.push_back({Tok::End, "", span_at(i, 0)});
  return out;
}

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Newline: return "end of line";
    case Tok::Quoted: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Cursor {
 public:
  Cursor(std::vector<Token> toks, bool skip_newlines)
      : toks_(std::move(toks)), skip_newlines_(skip_newlines) {
    skip();
  }

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }

  Token next() {
    Token t = toks_[pos_];
    if (t.kind != Tok::End) ++pos_;
    skip();
    return t;
  }

  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && to_lower(peek().text) == kw;
  }
  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    if (peek().kind == Tok::Error) throw ParseError(peek().text, peek().span);
    throw ParseError("expected " + expected + " but found " + describe(peek()), peek().span);
  }

  Token keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail("'" + std::string(kw) + "'");
    return next();
  }
  Token punct(std::string_view p) {
    if (!is_punct(p)) fail("'" + std::string(p) + "'");
    return next();
  }
  Token ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(what);
    return next();
  }
  Token quoted(const std::string& what) {
    if (peek().kind != Tok::Quoted) fail(what);
    if (peek().text.empty()) throw ParseError("empty quoted value", peek().span);
    return next();
  }

  /// Optionally signed integer literal.
  Value integer(const std::string& what) {
    SourceSpan span = peek().span;
    bool neg = false;
    if (is_punct("-")) {
      neg = true;
      next();
    }
    if (peek().kind != Tok::Int) fail(what);
    Token t = next();
    std::uint64_t mag = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<Value>::max()) + (neg ? 1 : 0);
    if (ec != std::errc{} || mag > limit) throw ParseError("integer out of range", span);
    if (neg) return mag == limit ? std::numeric_limits<Value>::min() : -static_cast<Value>(mag);
    return static_cast<Value>(mag);
  }

  bool at_line_end() const { return peek().kind == Tok::Newline || at_end(); }

  void end_line() {
    if (!at_line_end()) fail("end of line");
    while (peek().kind == Tok::Newline) ++pos_;
  }

  void skip_blank_lines() {
    while (peek().kind == Tok::Newline) ++pos_;
  }

  std::size_t position() const { return pos_; }
  const Token& at(std::size_t i) const { return toks_[i]; }

 private:
  void skip() {
    if (skip_newlines_)
      while (toks_[pos_].kind == Tok::Newline) ++pos_;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool skip_newlines_;
};

inline bool is_reserved(std::string_view word) {
  static constexpr std::string_view kws[] = {"when", "is", "or", "if", "then", "utility", "of"};
  auto lw = to_lower(word);
  for (auto k : kws)
    if (lw == k) return true;
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

/// Where a rule sits in its source text.
struct RuleLocation {
  SourceSpan start;  // the 'when' keyword
  int last_line = 1;
};

struct ParsedPolicy {
  Policy policy;
  std::vector<RuleLocation> locations;  // parallel to policy.rules
};

/// rule := "when" IDENT "is" QVAL ("or" QVAL)* "if" DOTTED_IDENT CMP INT
///         "then" "utility" "of" IDENT "is" QVAL
inline ParsedPolicy parse_policy_with_locations(std::string_view text) {
  detail::Cursor cur(detail::tokenize(text), /*skip_newlines=*/true);
  ParsedPolicy out;

  auto name = [&](const std::string& what) {
    detail::Token t = cur.ident(what);
    if (detail::is_reserved(t.text))
      throw ParseError("keyword '" + t.text + "' cannot be used as " + what, t.span);
    return t;
  };

  while (!cur.at_end()) {
    Rule rule;
    RuleLocation loc;
    loc.start = cur.keyword("when").span;

    rule.trigger.property = name("property name").text;
    cur.keyword("is");
    do {
      detail::Token q = cur.quoted("quoted level");
      Level l(q.text);
      if (rule.trigger.accepts(l)) throw ParseError("duplicate level " + q.text, q.span);
      rule.trigger.accepted.push_back(l);
      if (!cur.is_keyword("or")) break;
      cur.next();
    } while (true);

    if (!cur.is_keyword("if")) cur.fail("'if' or 'or'");
    cur.next();
    rule.condition.state_ref = name("state reference").text;
    if (cur.peek().kind != detail::Tok::Punct) cur.fail("comparison operator");
    auto op = parse_cmp(cur.peek().text);
    if (!op) cur.fail("comparison operator");
    cur.next();
    rule.condition.op = *op;
    rule.condition.value = cur.integer("integer");

    cur.keyword("then");
    cur.keyword("utility");
    cur.keyword("of");
    rule.action.property = name("action property").text;
    cur.keyword("is");
    detail::Token v = cur.quoted("quoted value");
    rule.action.value = Level(v.text);
    loc.last_line = v.span.line;

    if (!cur.at_end() && !cur.is_keyword("when")) cur.fail("'when' or end of input");

    out.policy.rules.push_back(std::move(rule));
    out.locations.push_back(loc);
  }
  return out;
}

inline Policy parse_policy(std::string_view text) { return parse_policy_with_locations(text).policy; }

inline std::string serialize_rule(const Rule& r) {
  std::string s = "when " + r.trigger.property + " is ";
  for (std::size_t i = 0; i < r.trigger.accepted.size(); ++i) {
    if (i) s += " or ";
    s += "'" + r.trigger.accepted[i].str() + "'";
  }
  s += "\nif " + r.condition.state_ref + " " + std::string(to_string(r.condition.op)) + " " +
       std::to_string(r.condition.value);
  s += "\nthen utility of " + r.action.property + " is '" + r.action.value.str() + "'\n";
  return s;
}

/// Canonical text: three lines per rule, blank line between rules.
inline std::string serialize_policy(const Policy& p) {
  std::string out;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    if (i) out += '\n';
    out += serialize_rule(p.rules[i]);
  }
  return out;
}

/// Seam for alternative policy syntaxes. Mutation and analysis only see
/// Policy values; a bridge converts between those and one concrete syntax.
class PolicyBridge {
 public:
  virtual ~PolicyBridge() = default;
  virtual std::string_view name() const = 0;
  virtual std::string_view extension() const = 0;
  virtual ParsedPolicy parse(std::string_view text) const = 0;
  virtual std::string serialize(const Policy& p) const = 0;
};

class EcaTextBridge final : public PolicyBridge {
 public:
  std::string_view name() const override { return "eca-text"; }
  std::string_view extension() const override { return ".apl"; }
  ParsedPolicy parse(std::string_view text) const override {
    return parse_policy_with_locations(text);
  }
  std::string serialize(const Policy& p) const override { return serialize_policy(p); }
};

inline const PolicyBridge& default_bridge() {
  static const EcaTextBridge bridge;
  return bridge;
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

inline ContextSchema parse_schema(std::string_view text) {
  detail::Cursor cur(detail::tokenize(text), /*skip_newlines=*/false);
  ContextSchema schema;
  cur.skip_blank_lines();
  while (!cur.at_end()) {
    SourceSpan decl = cur.keyword("property").span;
    PropertySchema p;
    p.name = cur.ident("property name").text;
    cur.punct(":");
    cur.keyword("int");
    cur.punct("[");
    p.lower = cur.integer("lower bound");
    cur.punct(",");
    p.upper = cur.integer("upper bound");
    cur.punct("]");
    cur.keyword("levels");
    cur.punct("{");
    while (!cur.is_punct("}")) {
      LevelInterval iv;
      iv.name = Level(cur.ident("level name").text);
      cur.punct(":");
      cur.punct("[");
      iv.lo = cur.integer("integer");
      cur.punct(",");
      iv.hi = cur.integer("integer");
      cur.punct("]");
      p.levels.push_back(iv);
      if (!cur.is_punct(",")) break;
      cur.next();
    }
    cur.punct("}");
    cur.end_line();
    try {
      check_property(p);
      if (schema.find(p.name)) throw ModelError("duplicate property " + p.name);
    } catch (const ModelError& e) {
      throw ParseError(e.what(), decl);
    }
    schema.properties.push_back(std::move(p));
  }
  if (schema.properties.empty()) throw ParseError("schema declares no properties", cur.peek().span);
  return schema;
}

inline std::string serialize_schema(const ContextSchema& s) {
  std::string out;
  for (const auto& p : s.properties) {
    out += "property " + p.name + " : int [" + std::to_string(p.lower) + "," +
           std::to_string(p.upper) + "] levels { ";
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      if (i) out += ", ";
      out += p.levels[i].name.str() + ": [" + std::to_string(p.levels[i].lo) + "," +
             std::to_string(p.levels[i].hi) + "]";
    }
    out += " }\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// System models
// ---------------------------------------------------------------------------

inline SystemModel parse_system_model(std::string_view text) {
  detail::Cursor cur(detail::tokenize(text), /*skip_newlines=*/false);
  SystemModel m;
  struct Ref {
    std::string name;
    SourceSpan span;
  };
  std::vector<Ref> refs;

  cur.skip_blank_lines();
  while (!cur.at_end()) {
    if (cur.is_keyword("state")) {
      cur.next();
      detail::Token n = cur.ident("state variable name");
      if (m.find_var(n.text)) throw ParseError("duplicate state variable " + n.text, n.span);
      cur.punct("=");
      m.state_vars.push_back({n.text, cur.integer("initial value")});
    } else if (cur.is_keyword("effect")) {
      cur.next();
      std::string prop = cur.ident("action property").text;
      Level value(cur.quoted("quoted action value").text);
      cur.punct("=>");
      Assignment a;
      detail::Token target = cur.ident("state variable name");
      a.target = target.text;
      refs.push_back({target.text, target.span});
      cur.punct(":=");
      if (cur.peek().kind == detail::Tok::Ident) {
        detail::Token v = cur.next();
        a.var = v.text;
        refs.push_back({v.text, v.span});
        if (cur.is_punct("+") || cur.is_punct("-")) {
          bool minus = cur.next().text == "-";
          Value k = cur.integer("integer");
          a.offset = minus ? -k : k;
        }
      } else {
        a.offset = cur.integer("integer or state variable");
      }
      // Lines sharing (action, value) accumulate into one effect.
      auto it = std::find_if(m.effects.begin(), m.effects.end(), [&](const Effect& e) {
        return e.action_property == prop && e.action_value == value;
      });
      if (it == m.effects.end()) {
        m.effects.push_back({prop, value, {a}});
      } else {
        it->assignments.push_back(a);
      }
    } else {
      cur.fail("'state' or 'effect'");
    }
    cur.end_line();
  }
  for (const auto& r : refs)
    if (!m.find_var(r.name)) throw ParseError("unknown state variable " + r.name, r.span);
  return m;
}

inline std::string serialize_assignment(const Assignment& a) {
  std::string s = a.target + " := ";
  if (!a.var) return s + std::to_string(a.offset);
  s += *a.var;
  if (a.offset == std::numeric_limits<Value>::min()) return s + " + " + std::to_string(a.offset);
  if (a.offset > 0) s += " + " + std::to_string(a.offset);
  if (a.offset < 0) s += " - " + std::to_string(-a.offset);
  return s;
}

inline std::string serialize_system_model(const SystemModel& m) {
  std::string out;
  for (const auto& v : m.state_vars) out += "state " + v.name + " = " + std::to_string(v.initial) + "\n";
  for (const auto& e : m.effects)
    for (const auto& a : e.assignments)
      out += "effect " + e.action_property + " '" + e.action_value.str() + "' => " +
             serialize_assignment(a) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

/// Parses one comma-separated instance per line, then applies validate_flow.
/// Throws ParseError on malformed lines and FlowError on invariant breaks.
inline ContextFlow parse_flow(std::string_view text, const ContextSchema& schema) {
  detail::Cursor cur(detail::tokenize(text), /*skip_newlines=*/false);
  ContextFlow flow;
  cur.skip_blank_lines();
  while (!cur.at_end()) {
    ContextInstance inst;
    inst.push_back(cur.integer("integer"));
    while (cur.is_punct(",")) {
      cur.next();
      inst.push_back(cur.integer("integer"));
    }
    cur.end_line();
    flow.instances.push_back(std::move(inst));
  }
  auto report = validate_flow(flow, schema);
  if (!report.ok()) throw FlowError(std::move(report));
  return flow;
}

inline std::string serialize_instance(const ContextInstance& inst) {
  std::string out;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(inst[i]);
  }
  return out;
}

inline std::string serialize_flow(const ContextFlow& flow) {
  std::string out;
  for (const auto& inst : flow.instances) out += serialize_instance(inst) + "\n";
  return out;
}

}  // namespace ecamut

#endif  // ECAMUT_TEXT_HPP
