/*
 * Copyright 2026 The Glidepod Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "glidepod/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace glidepod::expr {

// ---------------------------------------------------------------- Value

Value Value::integer(std::int64_t v) {
  Value out;
  out.kind_ = ValueKind::Integer;
  out.int_ = v;
  return out;
}

Value Value::real(double v) {
  Value out;
  out.kind_ = ValueKind::Real;
  out.real_ = v;
  return out;
}

Value Value::string(std::string v) {
  Value out;
  out.kind_ = ValueKind::String;
  out.str_ = std::move(v);
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.kind_ = ValueKind::Boolean;
  out.bool_ = v;
  return out;
}

Value Value::undefined() { return Value{}; }

Value Value::error(std::string diagnostic) {
  Value out;
  out.kind_ = ValueKind::Error;
  out.str_ = std::move(diagnostic);
  return out;
}

std::int64_t Value::as_integer() const {
  if (kind_ != ValueKind::Integer) throw std::logic_error("Value: not an integer");
  return int_;
}

double Value::as_real() const {
  if (kind_ == ValueKind::Integer) return static_cast<double>(int_);
  if (kind_ != ValueKind::Real) throw std::logic_error("Value: not numeric");
  return real_;
}

const std::string& Value::as_string() const {
  if (kind_ != ValueKind::String) throw std::logic_error("Value: not a string");
  return str_;
}

bool Value::as_boolean() const {
  if (kind_ != ValueKind::Boolean) throw std::logic_error("Value: not a boolean");
  return bool_;
}

bool Value::identical(const Value& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case ValueKind::Integer: return int_ == other.int_;
    case ValueKind::Real: return real_ == other.real_;
    case ValueKind::String: return str_ == other.str_;
    case ValueKind::Boolean: return bool_ == other.bool_;
    case ValueKind::Undefined: return true;
    case ValueKind::Error: return true;  // diagnostics do not affect identity
  }
  return false;
}

namespace {

std::string render_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, end);
  // Keep the real/integer distinction visible in source form.
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string Value::render() const {
  switch (kind_) {
    case ValueKind::Integer: return std::to_string(int_);
    case ValueKind::Real: return render_real(real_);
    case ValueKind::String: return quote_string(str_);
    case ValueKind::Boolean: return bool_ ? "true" : "false";
    case ValueKind::Undefined: return "undefined";
    case ValueKind::Error: return "error";
  }
  return "error";
}

// -------------------------------------------------------------- AttrBag

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

AttrBag::AttrBag(std::initializer_list<std::pair<std::string, Value>> init) {
  for (const auto& [name, value] : init) set(name, value);
}

void AttrBag::set(std::string name, Value value) {
  std::string key = fold_case(name);
  entries_[key] = Entry{std::move(name), std::move(value)};
}

Value AttrBag::get(std::string_view name) const {
  auto it = entries_.find(fold_case(name));
  if (it == entries_.end()) return Value::undefined();
  return it->second.value;
}

bool AttrBag::contains(std::string_view name) const {
  return entries_.find(fold_case(name)) != entries_.end();
}

std::vector<std::pair<std::string, Value>> AttrBag::items() const {
  std::vector<std::pair<std::string, Value>> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.emplace_back(entry.name, entry.value);
  return out;
}

bool AttrBag::operator==(const AttrBag& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    if (!a->second.value.identical(b->second.value)) return false;
  }
  return true;
}

// ------------------------------------------------------------- ExprNode

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Is: return "is";
    case BinaryOp::Isnt: return "isnt";
  }
  return "?";
}

ExprNode ExprNode::make_literal(Value v) {
  ExprNode n;
  n.kind = NodeKind::Literal;
  n.literal = std::move(v);
  return n;
}

ExprNode ExprNode::make_attr(std::string name) {
  ExprNode n;
  n.kind = NodeKind::AttrRef;
  n.name = std::move(name);
  return n;
}

ExprNode ExprNode::make_not(ExprNode child) {
  ExprNode n;
  n.kind = NodeKind::Not;
  n.args.push_back(std::move(child));
  return n;
}

ExprNode ExprNode::make_binary(BinaryOp op, ExprNode lhs, ExprNode rhs) {
  ExprNode n;
  n.kind = NodeKind::Binary;
  n.op = op;
  n.args.push_back(std::move(lhs));
  n.args.push_back(std::move(rhs));
  return n;
}

ExprNode ExprNode::make_call(std::string name, std::vector<ExprNode> args) {
  ExprNode n;
  n.kind = NodeKind::Call;
  n.name = std::move(name);
  n.args = std::move(args);
  return n;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Literal:
      if (!a.literal.identical(b.literal)) return false;
      break;
    case NodeKind::AttrRef:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::Call:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Not:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(a.args[i], b.args[i])) return false;
  return true;
}

ExprNode always_true() { return ExprNode::make_literal(Value::boolean(true)); }

std::vector<const ExprNode*> flatten_conjuncts(const ExprNode& node) {
  std::vector<const ExprNode*> out;
  if (node.kind == NodeKind::Binary && node.op == BinaryOp::And) {
    auto left = flatten_conjuncts(node.args[0]);
    out.insert(out.end(), left.begin(), left.end());
    auto right = flatten_conjuncts(node.args[1]);
    out.insert(out.end(), right.begin(), right.end());
  } else {
    out.push_back(&node);
  }
  return out;
}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok {
  End, LParen, RParen, Comma, Not, AndAnd, OrOr,
  Eq, Ne, Lt, Le, Gt, Ge, Is, Isnt,
  True, False, Undefined, Error,
  Integer, Real, String, Identifier,
};

struct Token {
  Tok kind = Tok::End;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;        // identifier spelling / string payload
  std::int64_t int_value = 0;
  double real_value = 0.0;
};

struct BuiltinInfo {
  const char* canonical;
  std::size_t min_arity;
  std::size_t max_arity;
};

// The supported builtin set; anything else is a parse error.
const std::map<std::string, BuiltinInfo>& builtins() {
  static const std::map<std::string, BuiltinInfo> table = {
      {"isundefined", {"isUndefined", 1, 1}},
      {"stringlistmember", {"stringListMember", 2, 3}},
  };
  return table;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.begin = pos_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      t.end = pos_;
      return t;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; t.kind = Tok::LParen; break;
      case ')': ++pos_; t.kind = Tok::RParen; break;
      case ',': ++pos_; t.kind = Tok::Comma; break;
      case '&':
        expect_pair('&', "&&");
        t.kind = Tok::AndAnd;
        break;
      case '|':
        expect_pair('|', "||");
        t.kind = Tok::OrOr;
        break;
      case '=':
        expect_pair('=', "==");
        t.kind = Tok::Eq;
        break;
      case '!':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '=') {
          ++pos_;
          t.kind = Tok::Ne;
        } else {
          t.kind = Tok::Not;
        }
        break;
      case '<':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '=') {
          ++pos_;
          t.kind = Tok::Le;
        } else {
          t.kind = Tok::Lt;
        }
        break;
      case '>':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '=') {
          ++pos_;
          t.kind = Tok::Ge;
        } else {
          t.kind = Tok::Gt;
        }
        break;
      case '"':
        lex_string(t);
        break;
      default:
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
          lex_number(t);
        } else if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
          lex_word(t);
        } else {
          throw ParseError(pos_, std::string("unexpected character '") + c + "'");
        }
    }
    t.end = pos_;
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  void expect_pair(char second, const char* op) {
    ++pos_;
    if (pos_ >= text_.size() || text_[pos_] != second)
      throw ParseError(pos_, std::string("malformed operator, expected '") + op + "'", op);
    ++pos_;
  }

  void lex_string(Token& t) {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_];
      if (c == '\\') {
        ++pos_;
        if (pos_ >= text_.size())
          throw ParseError(pos_, "unterminated string escape", "\"");
        switch (text_[pos_]) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default:
            throw ParseError(pos_, "unsupported string escape");
        }
      } else {
        out.push_back(c);
      }
      ++pos_;
    }
    if (pos_ >= text_.size())
      throw ParseError(pos_, "unterminated string literal", "\"");
    ++pos_;  // closing quote
    t.kind = Tok::String;
    t.text = std::move(out);
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    if (text_[pos_] == '-') ++pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError(start, "malformed number");
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    bool real = false;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      real = true;
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError(pos_, "malformed real literal: digits required after '.'");
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      real = true;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError(pos_, "malformed exponent");
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    std::string slice(text_.substr(start, pos_ - start));
    if (real) {
      t.kind = Tok::Real;
      t.real_value = std::strtod(slice.c_str(), nullptr);
    } else {
      t.kind = Tok::Integer;
      auto res = std::from_chars(slice.data(), slice.data() + slice.size(), t.int_value);
      if (res.ec != std::errc())
        throw ParseError(start, "integer literal out of range");
    }
  }

  void lex_word(Token& t) {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '_' || c == '.' || std::isalnum(static_cast<unsigned char>(c)))
        ++pos_;
      else
        break;
    }
    t.text = std::string(text_.substr(start, pos_ - start));
    std::string folded = fold_case(t.text);
    if (folded == "is") t.kind = Tok::Is;
    else if (folded == "isnt") t.kind = Tok::Isnt;
    else if (folded == "true") t.kind = Tok::True;
    else if (folded == "false") t.kind = Tok::False;
    else if (folded == "undefined") t.kind = Tok::Undefined;
    else if (folded == "error") t.kind = Tok::Error;
    else t.kind = Tok::Identifier;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// --------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  ExprNode parse_expression() {
    ExprNode e = parse_or();
    if (cur_.kind != Tok::End)
      throw ParseError(cur_.begin, "trailing input after expression", "end of input");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  bool accept(Tok k) {
    if (cur_.kind != k) return false;
    advance();
    return true;
  }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k)
      throw ParseError(cur_.begin, std::string("expected '") + what + "'", what);
    advance();
  }

  ExprNode parse_or() {
    ExprNode lhs = parse_and();
    while (cur_.kind == Tok::OrOr) {
      std::size_t begin = lhs.span.begin;
      advance();
      ExprNode rhs = parse_and();
      std::size_t end = rhs.span.end;
      lhs = ExprNode::make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs));
      lhs.span = {begin, end};
    }
    return lhs;
  }

  ExprNode parse_and() {
    ExprNode lhs = parse_cmp();
    while (cur_.kind == Tok::AndAnd) {
      std::size_t begin = lhs.span.begin;
      advance();
      ExprNode rhs = parse_cmp();
      std::size_t end = rhs.span.end;
      lhs = ExprNode::make_binary(BinaryOp::And, std::move(lhs), std::move(rhs));
      lhs.span = {begin, end};
    }
    return lhs;
  }

  ExprNode parse_cmp() {
    ExprNode lhs = parse_unary();
    for (;;) {
      BinaryOp op;
      switch (cur_.kind) {
        case Tok::Eq: op = BinaryOp::Eq; break;
        case Tok::Ne: op = BinaryOp::Ne; break;
        case Tok::Lt: op = BinaryOp::Lt; break;
        case Tok::Le: op = BinaryOp::Le; break;
        case Tok::Gt: op = BinaryOp::Gt; break;
        case Tok::Ge: op = BinaryOp::Ge; break;
        case Tok::Is: op = BinaryOp::Is; break;
        case Tok::Isnt: op = BinaryOp::Isnt; break;
        default: return lhs;
      }
      std::size_t begin = lhs.span.begin;
      advance();
      ExprNode rhs = parse_unary();
      std::size_t end = rhs.span.end;
      lhs = ExprNode::make_binary(op, std::move(lhs), std::move(rhs));
      lhs.span = {begin, end};
    }
  }

  ExprNode parse_unary() {
    if (cur_.kind == Tok::Not) {
      std::size_t begin = cur_.begin;
      advance();
      ExprNode child = parse_unary();
      std::size_t end = child.span.end;
      ExprNode n = ExprNode::make_not(std::move(child));
      n.span = {begin, end};
      return n;
    }
    return parse_primary();
  }

  ExprNode parse_primary() {
    Token t = cur_;
    switch (t.kind) {
      case Tok::LParen: {
        advance();
        ExprNode inner = parse_or();
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Integer:
        advance();
        return with_span(ExprNode::make_literal(Value::integer(t.int_value)), t);
      case Tok::Real:
        advance();
        return with_span(ExprNode::make_literal(Value::real(t.real_value)), t);
      case Tok::String:
        advance();
        return with_span(ExprNode::make_literal(Value::string(t.text)), t);
      case Tok::True:
        advance();
        return with_span(ExprNode::make_literal(Value::boolean(true)), t);
      case Tok::False:
        advance();
        return with_span(ExprNode::make_literal(Value::boolean(false)), t);
      case Tok::Undefined:
        advance();
        return with_span(ExprNode::make_literal(Value::undefined()), t);
      case Tok::Error:
        advance();
        return with_span(ExprNode::make_literal(Value::error()), t);
      case Tok::Identifier: {
        advance();
        if (cur_.kind == Tok::LParen) return parse_call(t);
        ExprNode n = ExprNode::make_attr(t.text);
        n.span = {t.begin, t.end};
        return n;
      }
      case Tok::End:
        throw ParseError(t.begin, "unexpected end of input", "expression");
      default:
        throw ParseError(t.begin, "expected an expression", "expression");
    }
  }

  ExprNode parse_call(const Token& name_tok) {
    auto it = builtins().find(fold_case(name_tok.text));
    if (it == builtins().end())
      throw ParseError(name_tok.begin,
                       "unknown function '" + name_tok.text + "'");
    expect(Tok::LParen, "(");
    std::vector<ExprNode> args;
    if (cur_.kind != Tok::RParen) {
      args.push_back(parse_or());
      while (accept(Tok::Comma)) args.push_back(parse_or());
    }
    Token closing = cur_;
    expect(Tok::RParen, ")");
    const BuiltinInfo& info = it->second;
    if (args.size() < info.min_arity || args.size() > info.max_arity)
      throw ParseError(name_tok.begin,
                       std::string("wrong number of arguments to ") + info.canonical);
    ExprNode n = ExprNode::make_call(info.canonical, std::move(args));
    n.span = {name_tok.begin, closing.end};
    return n;
  }

  static ExprNode with_span(ExprNode n, const Token& t) {
    n.span = {t.begin, t.end};
    return n;
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

ParseError::ParseError(std::size_t offset, std::string message, std::string expected)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      expected_(std::move(expected)) {}

ExprNode parse(std::string_view text) { return Parser(text).parse_expression(); }

// --------------------------------------------------------------- render

namespace {

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Binary:
      switch (n.op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        default: return 3;
      }
    case NodeKind::Not: return 4;
    default: return 5;
  }
}

void render_into(const ExprNode& n, std::string& out);

void render_child(const ExprNode& child, int parent_prec, bool right, std::string& out) {
  int child_prec = precedence(child);
  bool need = right ? child_prec <= parent_prec : child_prec < parent_prec;
  if (need) out.push_back('(');
  render_into(child, out);
  if (need) out.push_back(')');
}

void render_into(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Literal:
      out += n.literal.render();
      break;
    case NodeKind::AttrRef:
      out += n.name;
      break;
    case NodeKind::Not:
      out.push_back('!');
      if (precedence(n.args[0]) < precedence(n)) {
        out.push_back('(');
        render_into(n.args[0], out);
        out.push_back(')');
      } else {
        render_into(n.args[0], out);
      }
      break;
    case NodeKind::Binary: {
      int prec = precedence(n);
      render_child(n.args[0], prec, false, out);
      out.push_back(' ');
      out += to_string(n.op);
      out.push_back(' ');
      render_child(n.args[1], prec, true, out);
      break;
    }
    case NodeKind::Call: {
      out += n.name;
      out.push_back('(');
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out.push_back(',');
        render_into(n.args[i], out);
      }
      out.push_back(')');
      break;
    }
  }
}

}  // namespace

std::string render(const ExprNode& node) {
  std::string out;
  render_into(node, out);
  return out;
}

// ----------------------------------------------------------------- eval

namespace {

Value eval_not(const Value& v) {
  if (v.is_error()) return v;
  if (v.is_undefined()) return Value::undefined();
  if (!v.is_boolean()) return Value::error("'!' applied to non-boolean");
  return Value::boolean(!v.as_boolean());
}

Value eval_logic(BinaryOp op, const Value& l, const Value& r) {
  if (l.is_error()) return l;
  if (r.is_error()) return r;
  auto ok = [](const Value& v) { return v.is_boolean() || v.is_undefined(); };
  if (!ok(l) || !ok(r))
    return Value::error(std::string("non-boolean operand to '") + to_string(op) + "'");
  if (op == BinaryOp::And) {
    if ((l.is_boolean() && !l.as_boolean()) || (r.is_boolean() && !r.as_boolean()))
      return Value::boolean(false);
    if (l.is_boolean() && r.is_boolean()) return Value::boolean(true);
    return Value::undefined();
  }
  if ((l.is_boolean() && l.as_boolean()) || (r.is_boolean() && r.as_boolean()))
    return Value::boolean(true);
  if (l.is_boolean() && r.is_boolean()) return Value::boolean(false);
  return Value::undefined();
}

Value eval_compare(BinaryOp op, const Value& l, const Value& r) {
  if (l.is_error()) return l;
  if (r.is_error()) return r;
  if (l.is_undefined() || r.is_undefined()) return Value::undefined();

  int cmp;  // -1, 0, 1
  if (l.is_numeric() && r.is_numeric()) {
    if (l.kind() == ValueKind::Integer && r.kind() == ValueKind::Integer) {
      auto a = l.as_integer(), b = r.as_integer();
      cmp = a < b ? -1 : (a > b ? 1 : 0);
    } else {
      double a = l.as_real(), b = r.as_real();
      cmp = a < b ? -1 : (a > b ? 1 : 0);
    }
  } else if (l.is_string() && r.is_string()) {
    int c = l.as_string().compare(r.as_string());
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
  } else if (l.is_boolean() && r.is_boolean()) {
    if (op != BinaryOp::Eq && op != BinaryOp::Ne)
      return Value::error("booleans are not ordered");
    cmp = (l.as_boolean() == r.as_boolean()) ? 0 : 1;
  } else {
    return Value::error(std::string("type mismatch in '") + to_string(op) + "'");
  }

  switch (op) {
    case BinaryOp::Eq: return Value::boolean(cmp == 0);
    case BinaryOp::Ne: return Value::boolean(cmp != 0);
    case BinaryOp::Lt: return Value::boolean(cmp < 0);
    case BinaryOp::Le: return Value::boolean(cmp <= 0);
    case BinaryOp::Gt: return Value::boolean(cmp > 0);
    case BinaryOp::Ge: return Value::boolean(cmp >= 0);
    default: return Value::error("not a comparison");
  }
}

}  // namespace

Value string_list_member(const Value& member, const Value& list, const Value& delims) {
  for (const Value* v : {&member, &list, &delims})
    if (v->is_error()) return *v;
  for (const Value* v : {&member, &list, &delims})
    if (v->is_undefined()) return Value::undefined();
  for (const Value* v : {&member, &list, &delims})
    if (!v->is_string())
      return Value::error("stringListMember: arguments must be strings");

  std::string delim_set = delims.as_string();
  if (delim_set.empty()) delim_set = ", ";

  const std::string& text = list.as_string();
  const std::string& needle = member.as_string();
  std::size_t start = 0;
  auto check = [&](std::size_t begin, std::size_t end) {
    while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
    while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
    return end > begin && text.compare(begin, end - begin, needle) == 0;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (delim_set.find(text[i]) != std::string::npos) {
      if (check(start, i)) return Value::boolean(true);
      start = i + 1;
    }
  }
  if (check(start, text.size())) return Value::boolean(true);
  return Value::boolean(false);
}

Value eval(const ExprNode& node, const AttrBag& attrs) {
  switch (node.kind) {
    case NodeKind::Literal:
      return node.literal;
    case NodeKind::AttrRef:
      return attrs.get(node.name);
    case NodeKind::Not:
      return eval_not(eval(node.args[0], attrs));
    case NodeKind::Binary: {
      Value l = eval(node.args[0], attrs);
      Value r = eval(node.args[1], attrs);
      switch (node.op) {
        case BinaryOp::And:
        case BinaryOp::Or:
          return eval_logic(node.op, l, r);
        case BinaryOp::Is:
          return Value::boolean(l.identical(r));
        case BinaryOp::Isnt:
          return Value::boolean(!l.identical(r));
        default:
          return eval_compare(node.op, l, r);
      }
    }
    case NodeKind::Call: {
      std::vector<Value> args;
      args.reserve(node.args.size());
      for (const ExprNode& a : node.args) args.push_back(eval(a, attrs));
      if (node.name == "isUndefined")
        return Value::boolean(args[0].is_undefined());
      // stringListMember
      return string_list_member(args[0], args[1],
                                args.size() > 2 ? args[2] : Value::string(""));
    }
  }
  return Value::error("malformed expression node");
}

bool matches(const ExprNode& node, const AttrBag& attrs) {
  return eval(node, attrs).is_true();
}

}  // namespace glidepod::expr
