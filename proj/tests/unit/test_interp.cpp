#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

namespace {

Observable both(const std::string& src) {
  Comparison c = compare(parse_program(src));
  CHECK_MESSAGE(c.equivalent, c.oracle.text() << " vs " << c.eval.text());
  return c.eval;
}

}  // namespace

TEST_CASE("nondet paths keep separate state") {
  Observable o = both("async[nondet] { var n = 0; val x = await(choose([1, 2])); n += x; n }");
  CHECK(o.text() == "paths: 2\npath: 1\npath: 2\n");
}

TEST_CASE("nested nondet async") {
  Observable o = both(
      "async[nondet] { val inner = async[nondet] { await(choose([1, 2])) * 10 }; await(inner) + await(choose([0, 1])) }");
  CHECK(o.paths == std::vector<std::string>{"10", "11", "20", "21"});
}

TEST_CASE("option short circuit skips later effects") {
  Observable o = both("async[option] { tick(\"a\"); val x = await(none_of(0)); tick(\"b\"); x }");
  CHECK(o.text() == "None\n");
  CHECK(o.counters["a"] == 1);
  CHECK(o.counters.count("b") == 0);
}

TEST_CASE("failed awaits inside try reach the handler") {
  Observable o = both("async[result] { try { await(err_of(1, \"bad\")) } catch e => { 7 } }");
  CHECK(o.text() == "Ok 7\n");
}

TEST_CASE("throw in result") {
  Observable o = both("async[result] { val x = await(ok(1)); if x > 0 then throw \"neg\" else x }");
  CHECK(o.text() == "Err neg\n");
  CHECK(o.failed);
}

TEST_CASE("eventual runs on the scheduler") {
  Observable o = both("async[eventual] { val a = await(delay(2)); val b = await(spawn(\"s\", 3)); a * b }");
  CHECK(o.text() == "Ok 6\n");
}

TEST_CASE("eventual deadlock is reported") {
  try {
    run_source("async[eventual] { await(never_of(1)) }");
    FAIL("expected a deadlock");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Deadlock);
  }
}

TEST_CASE("resource finalizers on failure") {
  Observable o = both("async[resource] { val a = await(acquire(\"a\", 1)); val b = await(acquire(\"b\", 2)); a + b }");
  CHECK(o.finalizers == std::vector<std::string>{"b", "a"});
  CHECK(o.text().rfind("Ok 3\n", 0) == 0);
}

TEST_CASE("ident main") {
  CHECK(both("async[ident] { val x = await(pure_ident(4)); x * x }").text() == "16\n");
}
