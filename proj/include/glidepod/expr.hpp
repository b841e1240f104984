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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Lexer, parser and three-valued evaluator for the requirement-expression
// subset used by job filters: boolean logic, comparisons, `is`/`isnt`,
// and the builtins isUndefined / stringListMember.
namespace glidepod::expr {

enum class ValueKind { Integer, Real, String, Boolean, Undefined, Error };

// Tagged scalar. `undefined` and `error` are first-class values so that
// evaluation never throws; `error` optionally carries a diagnostic.
class Value {
 public:
  Value() = default;

  static Value integer(std::int64_t v);
  static Value real(double v);
  static Value string(std::string v);
  static Value boolean(bool v);
  static Value undefined();
  static Value error(std::string diagnostic = "");

  ValueKind kind() const { return kind_; }
  bool is_undefined() const { return kind_ == ValueKind::Undefined; }
  bool is_error() const { return kind_ == ValueKind::Error; }
  bool is_boolean() const { return kind_ == ValueKind::Boolean; }
  bool is_string() const { return kind_ == ValueKind::String; }
  bool is_numeric() const {
    return kind_ == ValueKind::Integer || kind_ == ValueKind::Real;
  }
  // True iff this is the boolean true value.
  bool is_true() const { return kind_ == ValueKind::Boolean && bool_; }

  std::int64_t as_integer() const;
  double as_real() const;  // integers promote
  const std::string& as_string() const;
  bool as_boolean() const;
  const std::string& diagnostic() const { return str_; }

  // Strict identity as used by `is`/`isnt`: same kind and equal payload.
  // Integer and real are never identical; error diagnostics are ignored.
  bool identical(const Value& other) const;
  bool operator==(const Value& other) const { return identical(other); }
  bool operator!=(const Value& other) const { return !identical(other); }

  // Literal source form: 42, 2.5, "text", true, undefined, error.
  std::string render() const;

 private:
  ValueKind kind_ = ValueKind::Undefined;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  bool bool_ = false;
  std::string str_;  // string payload, or error diagnostic
};

// Attribute bag with case-insensitive names. Absent names read as the
// undefined value, never an error. Iteration order is the case-folded
// name order; the original spelling of the last set() wins.
class AttrBag {
 public:
  AttrBag() = default;
  AttrBag(std::initializer_list<std::pair<std::string, Value>> init);

  void set(std::string name, Value value);
  Value get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // (original spelling, value) pairs in case-folded name order.
  std::vector<std::pair<std::string, Value>> items() const;

  bool operator==(const AttrBag& other) const;

 private:
  struct Entry {
    std::string name;  // original spelling
    Value value;
  };
  std::map<std::string, Entry> entries_;  // keyed by folded name
};

std::string fold_case(std::string_view s);

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class NodeKind { Literal, AttrRef, Not, Binary, Call };

enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Is, Isnt };

const char* to_string(BinaryOp op);

struct ExprNode {
  NodeKind kind = NodeKind::Literal;
  Value literal;                // Literal
  std::string name;             // AttrRef spelling / canonical builtin name
  BinaryOp op = BinaryOp::Or;   // Binary
  std::vector<ExprNode> args;   // Not: 1, Binary: 2, Call: n
  SourceSpan span;

  static ExprNode make_literal(Value v);
  static ExprNode make_attr(std::string name);
  static ExprNode make_not(ExprNode child);
  static ExprNode make_binary(BinaryOp op, ExprNode lhs, ExprNode rhs);
  static ExprNode make_call(std::string name, std::vector<ExprNode> args);
};

// Structural equality, ignoring source spans.
bool structurally_equal(const ExprNode& a, const ExprNode& b);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message, std::string expected = "");
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// Parses a complete expression. Precedence, loosest first:
// `||` < `&&` < comparisons (==,!=,<,<=,>,>=,is,isnt) < `!`.
// Unknown function names and bad arities are rejected here.
ExprNode parse(std::string_view text);

// Canonical single-line form with minimal parentheses.
// parse(render(e)) is structurally equal to e.
std::string render(const ExprNode& node);

// Three-valued evaluation. Never throws: type mismatches produce the
// error value, absent attributes read as undefined.
Value eval(const ExprNode& node, const AttrBag& attrs);

// True iff eval yields boolean true; undefined, error and non-boolean
// results all count as false.
bool matches(const ExprNode& node, const AttrBag& attrs);

// stringListMember builtin. Splits `list` on any character of `delims`
// (empty delims means ", "), trims whitespace per element, compares
// case-sensitively. An undefined argument yields undefined; an error
// argument propagates; any other non-string argument yields error.
Value string_list_member(const Value& member, const Value& list,
                         const Value& delims = Value::string(""));

// Literal `true` node, used for empty filter expressions.
ExprNode always_true();

// Top-level `&&` chain, flattened. A non-conjunction is one conjunct.
std::vector<const ExprNode*> flatten_conjuncts(const ExprNode& node);

}  // namespace glidepod::expr
