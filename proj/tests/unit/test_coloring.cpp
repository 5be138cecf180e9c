#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

namespace {

Verdict verdict_of(const std::string& name, const std::string& var) {
  ColoringResult r = color_program(parse_program(fixture(name)), {}, true);
  for (const auto& v : r.report.vars)
    if (v.name == var) return v.verdict;
  FAIL("no record for " << var);
  return Verdict::Async;
}

ErrorKind kind_of_failure(const std::string& src) {
  try {
    color_program(parse_program(src));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Kernel;
}

}  // namespace

TEST_CASE("fixture verdicts") {
  CHECK(verdict_of("color_cached", "x") == Verdict::CachedSync);
  CHECK(verdict_of("color_async", "x") == Verdict::Async);
  CHECK(verdict_of("color_mixed", "x") == Verdict::MixedError);
  CHECK(verdict_of("color_external", "x") == Verdict::ExternalMultiSyncError);
  CHECK(verdict_of("color_eventual", "job") == Verdict::CachedSync);
}

TEST_CASE("report text") {
  ColoringResult r = color_program(parse_program(fixture("color_cached")), {}, true);
  CHECK(r.report.text() == "x CachedSync sync=2 async=0\n");
  CHECK_FALSE(r.report.has_errors());
}

TEST_CASE("error verdicts throw when applied") {
  CHECK(kind_of_failure(fixture("color_mixed")) == ErrorKind::Coloring);
  CHECK(kind_of_failure(fixture("color_external")) == ErrorKind::Coloring);
  CHECK(kind_of_failure("async[ident] { var x = pure_ident(1); x + 1 }") == ErrorKind::Coloring);
  CHECK(kind_of_failure("async[nondet] { val x = choose([1, 2]); x + x }") == ErrorKind::Memoization);
}

TEST_CASE("single sync use is plain") {
  ColoringResult r = color_program(parse_program("async[option] { val x = some(2); x + 1 }"), {}, true);
  REQUIRE(r.report.vars.size() == 1);
  CHECK(r.report.vars[0].verdict == Verdict::PlainSync);
}

TEST_CASE("a use inside a loop counts twice") {
  ColoringResult r = color_program(
      parse_program("async[option] { val x = some(2); var i = 0; while i < 3 do { i += x }; i }"), {}, true);
  REQUIRE(r.report.vars.size() == 1);
  CHECK(r.report.vars[0].sync == 2);
  CHECK(r.report.vars[0].verdict == Verdict::CachedSync);
}

TEST_CASE("cached value runs its effect once") {
  PipelineOptions po;
  po.coloring = true;
  CHECK(run_fixture("color_eventual", po).counters["job"] == 1);
  // a future caches its outcome, so explicit awaits agree
  Observable fut = run_source("async[eventual] {\n  val job = spawn(\"job\", 21);\n  await(job) + await(job)\n}\n");
  CHECK(fut.text() == "Ok 42\n");
  CHECK(fut.counters["job"] == 1);
  // a resource plan reruns on every await unless memoized
  CHECK(run_source("async[resource] { val job = io(\"job\", 21); await(job) + await(job) }").counters["job"] == 2);
  CHECK(run_source("async[resource] { val job = io(\"job\", 21); job + job }", po).counters["job"] == 1);
}

TEST_CASE("value discard") {
  ColoringResult r = color_program(parse_program(fixture("discard_await")));
  REQUIRE(r.report.discards.size() == 1);
  CHECK(r.report.discards[0].awaited);
  CHECK(r.report.discards[0].type == "option[Unit]");
  CHECK(kind_of_failure(fixture("discard_error")) == ErrorKind::Discard);
  ColoringResult ok = color_program(parse_program("async[option] { 3; tick(\"a\"); 5 }"));
  REQUIRE(ok.report.discards.size() == 1);
  CHECK_FALSE(ok.report.discards[0].awaited);
  CHECK(ok.report.discards[0].type == "Int");
}

TEST_CASE("registering a type allows discarding it") {
  DiscardRegistry reg;
  reg.value_types.insert("List[Int]");
  ColoringResult r = color_program(parse_program(fixture("discard_error")), reg);
  CHECK(r.report.discards.size() == 1);
}
