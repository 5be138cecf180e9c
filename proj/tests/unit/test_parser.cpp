#include "doctest.h"

#include "cpsforge/parser.hpp"

using namespace cpsforge;

namespace {
ExprPtr P(std::string_view s) { return parse_expr(s); }
}  // namespace

TEST_CASE("literals and simple forms") {
  CHECK(struct_eq(P("42"), mk::int_(42)));
  CHECK(struct_eq(P("-7"), mk::int_(-7)));
  CHECK(struct_eq(P("\"a\\nb\""), mk::str("a\nb")));
  CHECK(struct_eq(P("unit"), mk::unit()));
  CHECK(struct_eq(P("if a then 1 else 2"), mk::if_(mk::var("a"), mk::int_(1), mk::int_(2))));
  CHECK(pretty(mk::if_(mk::var("a"), mk::int_(1), mk::int_(2))) == "if a then 1 else 2");
  CHECK(pretty(mk::int_(42)) == "42");
}

TEST_CASE("async block body is a Block") {
  auto e = P("async[ident] { 1 }");
  CHECK(struct_eq(e, mk::async("ident", mk::block({mk::int_(1)}))));
  CHECK(pretty(mk::async("option", mk::block({mk::await(mk::var("x"))}))) == "async[option] { await(x) }");
}

TEST_CASE("val scopes the rest of the block") {
  auto e = P("async[ident] { val x = await(f()); x + 1 }");
  auto want = mk::async(
      "ident", mk::block({mk::val("x", mk::await(mk::call("f", {})), mk::method(mk::var("x"), "plus", {mk::int_(1)}))}));
  CHECK(struct_eq(e, want));
  auto e2 = P("{ val x = 1; a; b }");
  CHECK(struct_eq(e2, mk::block({mk::val("x", mk::int_(1), mk::block({mk::var("a"), mk::var("b")}))})));
}

TEST_CASE("precedence and associativity") {
  auto e = P("1 + 2 * 3 < 4 && true || false");
  auto mul = mk::method(mk::int_(2), "times", {mk::int_(3)});
  auto add = mk::method(mk::int_(1), "plus", {mul});
  auto lt = mk::method(add, "lt", {mk::int_(4)});
  auto an = mk::method(lt, "and", {mk::bool_(true)});
  CHECK(struct_eq(e, mk::method(an, "or", {mk::bool_(false)})));
  auto sub = P("a - b - c");
  CHECK(struct_eq(sub, mk::method(mk::method(mk::var("a"), "minus", {mk::var("b")}), "minus", {mk::var("c")})));
  CHECK(pretty(mk::method(mk::var("a"), "minus", {mk::method(mk::var("b"), "minus", {mk::var("c")})})) == "a - (b - c)");
}

TEST_CASE("assignment sugar") {
  auto e = P("n += 3");
  CHECK(struct_eq(e, mk::assign("n", mk::method(mk::var("n"), "plus", {mk::int_(3)}))));
}

TEST_CASE("errors") {
  try {
    parse_program("if a then");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.span().line == 1);
    CHECK(e.span().col == 10);
    CHECK(e.expected().count("expression") == 1);
  }
  CHECK_THROWS_AS(parse_program("{ 1; "), ParseError);
  CHECK_THROWS_AS(parse_program("\"abc"), ParseError);
  CHECK_THROWS_AS(parse_program("1 2"), ParseError);
}

TEST_CASE("comments and CRLF") {
  auto p = parse_program("// header\r\ndef f(x: Int): Int = { x + 1 }\r\nf(2) // call\r\n");
  REQUIRE(p.defs.size() == 1);
  CHECK(p.defs[0].name == "f");
  CHECK(struct_eq(p.main, mk::call("f", {mk::int_(2)})));
}

TEST_CASE("types") {
  auto p = parse_program(
      "def g(a: List[Int], b: Option[Str], c: (Int, Bool) -> Int, d: eventual[Int], e: Cache): Unit = { unit }\n0");
  const auto& ps = p.defs[0].params;
  CHECK(show_ty(ps[0].ty) == "List[Int]");
  CHECK(show_ty(ps[1].ty) == "Option[Str]");
  CHECK(show_ty(ps[2].ty) == "(Int, Bool) -> Int");
  CHECK(ps[3].ty->is_monad("eventual"));
  CHECK(ps[4].ty->kind == TyKind::Receiver);
}

TEST_CASE("roundtrip of surface programs") {
  const char* srcs[] = {
      "async[option] { val x = await(some(1)); var y = 0; y = y + x; while y < 3 do { y = y + 1 }; y }",
      "match x { case 1 => \"one\" case -2 => \"neg\" case _ => \"other\" }",
      "try { throw \"boom\" } catch e => { e } finally { unit }",
      "[1, 2, 3].map(fun(x: Int) => x * 2).filter(fun(y: Int) => y > 2)",
      "(fun(x: Int) => x)(3)",
      "val f = fun(x: Int) => (val y = x; y + 1); f(2)",
      "async[nondet] { async[option] { 1 }; 2 }",
      "if if a then b else c then (val q = 1; q) else -1",
      "(-1).abs()",
      "{ { 1; 2 }; 3 }",
  };
  for (std::string s : srcs) {
    CAPTURE(s);
    auto p = parse_program(s);
    auto text = pretty(p);
    CAPTURE(text);
    auto q = parse_program(text);
    CHECK(struct_eq(p, q));
    CHECK(pretty(q) == text);
  }
}

TEST_CASE("roundtrip of core notation") {
  auto e = mk::flat_map(mk::adopt(mk::var("m"), 1), "x", mk::pure(mk::method(mk::var("x"), "plus", {mk::int_(1)})));
  CHECK(pretty(e) == "F.flatMap(F.adoptAwait(m))(x => F.pure(x + 1))");
  CHECK(struct_eq(P(pretty(e)), e));
  auto t = mk::flat_map_try(mk::var("m"), "v", mk::pure(mk::var("v")), "e", mk::error(mk::var("e")));
  CHECK(struct_eq(P(pretty(t)), t));
  auto c = mk::cps_block("option", mk::val("a", mk::int_(1), mk::pure(mk::var("a"))));
  CHECK(struct_eq(P(pretty(c)), c));
  auto s = mk::shift_call("asyncShift-fo", mk::method(mk::var("xs"), "map", {mk::var("g")}), "filter",
                          {mk::var("h")});
  CHECK(struct_eq(P(pretty(s)), s));
  auto w = mk::while_helper(mk::var("c"), mk::finish_chain(mk::chain_op(mk::var("b"), "map", mk::var("f"))));
  CHECK(struct_eq(P(pretty(w)), w));
  auto cv = mk::convert("option", "result", mk::var("z"));
  CHECK(struct_eq(P(pretty(cv)), cv));
}
