#include "doctest.h"

#include "cpsforge/parser.hpp"
#include "cpsforge/typer.hpp"

using namespace cpsforge;

namespace {

std::string type_error(const std::string& src) {
  try {
    typecheck(parse_program(src));
  } catch (const TypeError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("type errors") {
  CHECK(type_error("await(some(1))") == "await outside async");
  CHECK(type_error("async[option] { await(ok(1)) }") == "no conversion from result to option");
  CHECK(type_error("async[bogus] { 1 }") == "unknown monad 'bogus'");
  CHECK(type_error("async[option] { 1 + true }") == "operand of '+': expected Int, found Bool");
  CHECK(type_error("async[result] { val x = await(some(1)); x }").empty());
}

TEST_CASE("awaits record conversions") {
  TypedProgram t = typecheck(parse_program("async[result] { await(some(1)) + await(ok(2)) }"));
  REQUIRE(t.awaits.size() == 2);
  CHECK(t.awaits[0].inner == "option");
  CHECK(t.awaits[0].outer == "result");
  CHECK(t.awaits[0].conversion_needed);
  CHECK_FALSE(t.awaits[1].conversion_needed);
}

TEST_CASE("main type") {
  TypedProgram t = typecheck(parse_program("async[option] { val x = await(some(1)); [x, 2] }"));
  CHECK(show_ty(t.program.main->ty) == "option[List[Int]]");
}

TEST_CASE("lenient mode records implicit awaits") {
  std::string src = "async[option] { val x = some(1); x + 1 }";
  CHECK_THROWS_AS(typecheck(parse_program(src)), TypeError);
  TypedProgram t = typecheck(parse_program(src), {true});
  CHECK(t.implicit_awaits.size() == 1);
}

TEST_CASE("has_await ignores nested async blocks") {
  CHECK(has_await(parse_expr("1 + await(x)")));
  CHECK_FALSE(has_await(parse_expr("async[option] { await(x) }")));
}
