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

#include <random>
#include <string>
#include <vector>

#include "doctest.h"

using namespace glidepod::expr;

namespace {

// ---- independent oracles, written before the evaluator ----

// Three-valued truth tables, frozen by hand. 'T', 'F', 'U'.
struct TruthRow {
  char lhs, rhs, conj, disj;
};
const TruthRow kTruthTable[] = {
    // l    r    &&   ||
    {'T', 'T', 'T', 'T'},
    {'T', 'F', 'F', 'T'},
    {'T', 'U', 'U', 'T'},
    {'F', 'T', 'F', 'T'},
    {'F', 'F', 'F', 'F'},
    {'F', 'U', 'F', 'U'},
    {'U', 'T', 'U', 'T'},
    {'U', 'F', 'F', 'U'},
    {'U', 'U', 'U', 'U'},
};
const char kNotTable[3][2] = {{'T', 'F'}, {'F', 'T'}, {'U', 'U'}};

Value tv(char c) {
  switch (c) {
    case 'T': return Value::boolean(true);
    case 'F': return Value::boolean(false);
    default: return Value::undefined();
  }
}

const char* tv_literal(char c) {
  switch (c) {
    case 'T': return "true";
    case 'F': return "false";
    default: return "undefined";
  }
}

// Split-and-compare oracle for stringListMember, independent of the
// implementation: splits on the delimiter set, trims blanks, compares.
bool oracle_list_member(const std::string& member, const std::string& list,
                        std::string delims) {
  if (delims.empty()) delims = ", ";
  std::vector<std::string> elems;
  std::string cur;
  for (char c : list) {
    if (delims.find(c) != std::string::npos) {
      elems.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  elems.push_back(cur);
  for (auto& e : elems) {
    std::size_t b = e.find_first_not_of(" \t");
    std::size_t t = e.find_last_not_of(" \t");
    e = (b == std::string::npos) ? "" : e.substr(b, t - b + 1);
    if (!e.empty() && e == member) return true;
  }
  return false;
}

// Random AST generator for the round-trip property.
ExprNode random_expr(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  if (depth <= 0 || pick(4) == 0) {
    switch (pick(6)) {
      case 0: return ExprNode::make_literal(Value::integer(static_cast<std::int64_t>(rng() % 2001) - 1000));
      case 1: return ExprNode::make_literal(Value::real((static_cast<double>(rng() % 10000) - 5000.0) / 8.0));
      case 2: return ExprNode::make_literal(Value::string(pick(2) ? "SDSC-PRP" : "a b,c\"d\\e"));
      case 3: return ExprNode::make_literal(Value::boolean(pick(2) == 0));
      case 4: return ExprNode::make_literal(Value::undefined());
      default: {
        const char* names[] = {"DESIRED_Sites", "x", "Project.Name", "_a1"};
        return ExprNode::make_attr(names[pick(4)]);
      }
    }
  }
  switch (pick(4)) {
    case 0:
      return ExprNode::make_not(random_expr(rng, depth - 1));
    case 1: {
      BinaryOp ops[] = {BinaryOp::Or,  BinaryOp::And, BinaryOp::Eq,
                        BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,
                        BinaryOp::Gt,  BinaryOp::Ge,  BinaryOp::Is,
                        BinaryOp::Isnt};
      return ExprNode::make_binary(ops[pick(10)], random_expr(rng, depth - 1),
                                   random_expr(rng, depth - 1));
    }
    case 2:
      return ExprNode::make_call("isUndefined", {random_expr(rng, depth - 1)});
    default:
      return ExprNode::make_call(
          "stringListMember",
          {random_expr(rng, depth - 1), random_expr(rng, depth - 1),
           ExprNode::make_literal(Value::string(","))});
  }
}

Value random_scalar(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return Value::integer(static_cast<std::int64_t>(rng() % 100));
    case 1: return Value::real(static_cast<double>(rng() % 100) / 4.0);
    case 2: return Value::string(rng() % 2 ? "alpha" : "beta");
    default: return Value::boolean(rng() % 2 == 0);
  }
}

}  // namespace

TEST_CASE("three-valued truth tables for && and ||") {
  for (const auto& row : kTruthTable) {
    CAPTURE(row.lhs);
    CAPTURE(row.rhs);
    ExprNode conj = ExprNode::make_binary(BinaryOp::And,
                                          ExprNode::make_literal(tv(row.lhs)),
                                          ExprNode::make_literal(tv(row.rhs)));
    ExprNode disj = ExprNode::make_binary(BinaryOp::Or,
                                          ExprNode::make_literal(tv(row.lhs)),
                                          ExprNode::make_literal(tv(row.rhs)));
    CHECK(eval(conj, {}) == tv(row.conj));
    CHECK(eval(disj, {}) == tv(row.disj));

    // Same through the parser, from literal source text.
    std::string src_and = std::string(tv_literal(row.lhs)) + " && " + tv_literal(row.rhs);
    std::string src_or = std::string(tv_literal(row.lhs)) + " || " + tv_literal(row.rhs);
    CHECK(eval(parse(src_and), {}) == tv(row.conj));
    CHECK(eval(parse(src_or), {}) == tv(row.disj));
  }
  for (const auto& row : kNotTable) {
    ExprNode neg = ExprNode::make_not(ExprNode::make_literal(tv(row[0])));
    CHECK(eval(neg, {}) == tv(row[1]));
  }
}

TEST_CASE("undefined && false is false (literal forms)") {
  CHECK(eval(parse("undefined && false"), {}) == Value::boolean(false));
}

TEST_CASE("error absorbs through operators except is/isnt") {
  AttrBag attrs;
  CHECK(eval(parse("3 && \"x\""), attrs).is_error());
  CHECK(eval(parse("true && (3 && \"x\")"), attrs).is_error());
  CHECK(eval(parse("false && (3 && \"x\")"), attrs).is_error());
  CHECK(eval(parse("true || (3 && \"x\")"), attrs).is_error());
  CHECK(eval(parse("!(3 && \"x\")"), attrs).is_error());
  CHECK(eval(parse("(3 && \"x\") == 1"), attrs).is_error());
  // is/isnt stay definite even against error.
  CHECK(eval(parse("(3 && \"x\") is error"), attrs) == Value::boolean(true));
  CHECK(eval(parse("(3 && \"x\") isnt error"), attrs) == Value::boolean(false));
  CHECK(eval(parse("(3 && \"x\") is undefined"), attrs) == Value::boolean(false));
}

TEST_CASE("parse: function call wrapped in not") {
  ExprNode node = parse("(!isUndefined(ProjectName))");
  REQUIRE(node.kind == NodeKind::Not);
  REQUIRE(node.args.size() == 1);
  const ExprNode& call = node.args[0];
  CHECK(call.kind == NodeKind::Call);
  CHECK(call.name == "isUndefined");
  REQUIRE(call.args.size() == 1);
  CHECK(call.args[0].kind == NodeKind::AttrRef);
  CHECK(call.args[0].name == "ProjectName");
}

TEST_CASE("parse: single literal") {
  ExprNode node = parse("true");
  CHECK(node.kind == NodeKind::Literal);
  CHECK(node.literal == Value::boolean(true));
}

TEST_CASE("parse: unbalanced paren reports offset and expectation") {
  const std::string text = "a && (b";
  try {
    parse(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == text.size());
    CHECK(e.expected() == ")");
  }
}

TEST_CASE("parse: unknown function rejected") {
  CHECK_THROWS_AS(parse("regexp(\"a\", x)"), ParseError);
  CHECK_THROWS_AS(parse("isUndefined(a, b)"), ParseError);   // arity
  CHECK_THROWS_AS(parse("stringListMember(\"a\")"), ParseError);
}

TEST_CASE("parse: precedence is ! > cmp > && > ||") {
  CHECK(structurally_equal(
      parse("a || b && c"),
      ExprNode::make_binary(BinaryOp::Or, ExprNode::make_attr("a"),
                            ExprNode::make_binary(BinaryOp::And,
                                                  ExprNode::make_attr("b"),
                                                  ExprNode::make_attr("c")))));
  CHECK(structurally_equal(
      parse("!a == b"),
      ExprNode::make_binary(BinaryOp::Eq,
                            ExprNode::make_not(ExprNode::make_attr("a")),
                            ExprNode::make_attr("b"))));
  CHECK(structurally_equal(
      parse("a == b && c"),
      ExprNode::make_binary(BinaryOp::And,
                            ExprNode::make_binary(BinaryOp::Eq,
                                                  ExprNode::make_attr("a"),
                                                  ExprNode::make_attr("b")),
                            ExprNode::make_attr("c"))));
  // Parentheses override.
  CHECK(structurally_equal(
      parse("(a || b) && c"),
      ExprNode::make_binary(BinaryOp::And,
                            ExprNode::make_binary(BinaryOp::Or,
                                                  ExprNode::make_attr("a"),
                                                  ExprNode::make_attr("b")),
                            ExprNode::make_attr("c"))));
}

TEST_CASE("eval: is undefined on an absent attribute") {
  AttrBag attrs;
  CHECK(eval(parse("DESIRED_Sites is undefined"), attrs) == Value::boolean(true));
  attrs.set("DESIRED_Sites", Value::string("SDSC-PRP"));
  CHECK(eval(parse("DESIRED_Sites is undefined"), attrs) == Value::boolean(false));
}

TEST_CASE("eval: comparison") {
  AttrBag attrs{{"X", Value::integer(3)}};
  CHECK(eval(parse("X < 5"), attrs) == Value::boolean(true));
  CHECK(eval(parse("X > 5"), attrs) == Value::boolean(false));
  CHECK(eval(parse("X == 3"), attrs) == Value::boolean(true));
  // Integer promotes to real when compared against a real.
  CHECK(eval(parse("X < 3.5"), attrs) == Value::boolean(true));
  CHECK(eval(parse("X == 3.0"), attrs) == Value::boolean(true));
  // But `is` stays strict across kinds.
  CHECK(eval(parse("X is 3.0"), attrs) == Value::boolean(false));
  CHECK(eval(parse("X is 3"), attrs) == Value::boolean(true));
  // Strings compare case-sensitively.
  attrs.set("S", Value::string("Alpha"));
  CHECK(eval(parse("S == \"Alpha\""), attrs) == Value::boolean(true));
  CHECK(eval(parse("S == \"alpha\""), attrs) == Value::boolean(false));
  // Cross-kind comparison is an error.
  CHECK(eval(parse("S < 3"), attrs).is_error());
}

TEST_CASE("eval: comparisons with an undefined side are undefined") {
  AttrBag attrs;
  CHECK(eval(parse("Missing < 5"), attrs).is_undefined());
  CHECK(eval(parse("5 == Missing"), attrs).is_undefined());

  // Property: any comparison against undefined is undefined, for random
  // literals on the defined side.
  std::mt19937_64 rng(20260810);
  BinaryOp cmps[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                     BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
  for (int i = 0; i < 200; ++i) {
    Value v = random_scalar(rng);
    BinaryOp op = cmps[rng() % 6];
    ExprNode left = ExprNode::make_binary(op, ExprNode::make_literal(v),
                                          ExprNode::make_attr("Absent"));
    ExprNode right = ExprNode::make_binary(op, ExprNode::make_attr("Absent"),
                                           ExprNode::make_literal(v));
    CHECK(eval(left, attrs).is_undefined());
    CHECK(eval(right, attrs).is_undefined());
  }
}

TEST_CASE("string_list_member: membership oracle") {
  auto slm = [](const std::string& m, const std::string& l, const std::string& d) {
    return string_list_member(Value::string(m), Value::string(l), Value::string(d));
  };
  CHECK(slm("SDSC-PRP", "SDSC-PRP,UNL", "") == Value::boolean(true));
  CHECK(slm("SDSC-PRP", "", "") == Value::boolean(false));
  CHECK(slm("UNL", "SDSC-PRP, UNL", "") == Value::boolean(true));
  CHECK(slm("SDSC", "SDSC-PRP,UNL", "") == Value::boolean(false));
  CHECK(slm("a", "b;a", ";") == Value::boolean(true));
  CHECK(slm("a", "b,a", ";") == Value::boolean(false));

  // Randomized agreement with the split-and-compare oracle.
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab, ;x-";
  for (int i = 0; i < 500; ++i) {
    std::string list;
    for (std::size_t n = rng() % 12; n > 0; --n)
      list.push_back(alphabet[rng() % alphabet.size()]);
    std::string member = (rng() % 2) ? "a" : "ax";
    std::string delims = (rng() % 3 == 0) ? ";" : "";
    CHECK(slm(member, list, delims) ==
          Value::boolean(oracle_list_member(member, list, delims)));
  }
}

TEST_CASE("string_list_member: undefined list yields undefined") {
  CHECK(string_list_member(Value::string("SDSC-PRP"), Value::undefined(),
                           Value::string("")).is_undefined());
  // Guarded usage: `true || undefined` must stay true.
  AttrBag attrs;
  Value v = eval(parse("(DESIRED_Sites is undefined) || "
                       "stringListMember(\"SDSC-PRP\",DESIRED_Sites,\"\")"),
                 attrs);
  CHECK(v == Value::boolean(true));
}

TEST_CASE("string_list_member: non-string arguments are errors") {
  CHECK(string_list_member(Value::integer(3), Value::string("a"),
                           Value::string("")).is_error());
  CHECK(string_list_member(Value::string("a"), Value::boolean(true),
                           Value::string("")).is_error());
  CHECK(string_list_member(Value::string("a"), Value::error("boom"),
                           Value::string("")).is_error());
}

namespace {
const char kSiteFilter[] =
    "((DESIRED_Sites is undefined)|| \n"
    "  stringListMember(\"SDSC-PRP\",DESIRED_Sites,\"\"))&& \n"
    "((UNDESIRED_Sites is undefined)|| \n"
    "  !stringListMember(\"SDSC-PRP\",UNDESIRED_Sites,\"\"))&& \n"
    "(!isUndefined(ProjectName))&& \n"
    "(!isUndefined(SingularityImage))";
}

TEST_CASE("matches: full site filter against hand-evaluated bags") {
  ExprNode filter = parse(kSiteFilter);

  AttrBag pass{{"DESIRED_Sites", Value::string("SDSC-PRP")},
               {"ProjectName", Value::string("P")},
               {"SingularityImage", Value::string("img")}};
  CHECK(matches(filter, pass));

  AttrBag deny{{"ProjectName", Value::string("P")},
               {"SingularityImage", Value::string("img")},
               {"UNDESIRED_Sites", Value::string("SDSC-PRP")}};
  CHECK_FALSE(matches(filter, deny));

  AttrBag no_project{{"SingularityImage", Value::string("img")}};
  CHECK_FALSE(matches(filter, no_project));
}

TEST_CASE("matches is total over arbitrary expressions and bags") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    ExprNode e = random_expr(rng, 4);
    AttrBag attrs;
    if (rng() % 2) attrs.set("x", random_scalar(rng));
    if (rng() % 2) attrs.set("DESIRED_Sites", Value::string("SDSC-PRP,UNL"));
    // Must not throw, whatever the typing.
    (void)matches(e, attrs);
    Value v = eval(e, attrs);
    if (!v.is_true()) CHECK_FALSE(matches(e, attrs));
  }
}

TEST_CASE("render round-trips structurally") {
  std::mt19937_64 rng(20260401);
  for (int i = 0; i < 400; ++i) {
    ExprNode e = random_expr(rng, 5);
    std::string text = render(e);
    CAPTURE(text);
    ExprNode back = parse(text);
    CHECK(structurally_equal(e, back));
  }
  // Canonical text is a fixed point.
  ExprNode filter = parse(kSiteFilter);
  CHECK(render(parse(render(filter))) == render(filter));
}

TEST_CASE("eval is unchanged when attribute names are upper-cased") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 200; ++i) {
    ExprNode e = random_expr(rng, 4);
    AttrBag lower, upper;
    const char* names[] = {"desired_sites", "x", "project.name", "_a1"};
    for (const char* n : names) {
      if (rng() % 2) continue;
      Value v = random_scalar(rng);
      std::string up(n);
      for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      lower.set(n, v);
      upper.set(up, v);
    }
    CHECK(eval(e, lower) == eval(e, upper));
  }
}

TEST_CASE("attribute lookup is case-insensitive and total") {
  AttrBag attrs{{"DESIRED_Sites", Value::string("X")}};
  CHECK(attrs.get("desired_sites") == Value::string("X"));
  CHECK(attrs.get("DESIRED_SITES") == Value::string("X"));
  CHECK(attrs.get("absent").is_undefined());
  CHECK_FALSE(attrs.contains("absent"));
}

TEST_CASE("flatten_conjuncts counts top-level && terms") {
  CHECK(flatten_conjuncts(parse(kSiteFilter)).size() == 4);
  CHECK(flatten_conjuncts(parse("a")).size() == 1);
  CHECK(flatten_conjuncts(parse("a && b && c")).size() == 3);
  CHECK(flatten_conjuncts(parse("a || b")).size() == 1);
}

TEST_CASE("negative numeric literals") {
  CHECK(eval(parse("-3 < -2"), {}) == Value::boolean(true));
  CHECK(eval(parse("x == -1.5"), AttrBag{{"x", Value::real(-1.5)}}) ==
        Value::boolean(true));
}
