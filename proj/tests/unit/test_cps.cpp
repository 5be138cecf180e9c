#include "doctest.h"

#include <set>

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

TEST_CASE("rule goldens") {
  std::vector<std::string> names = golden_names();
  std::set<std::string> want = {"trivial", "sequential", "val",     "assign", "condition",   "if_pure_cond",
                                "if_all_pure", "match",  "while",   "try",    "throw",       "lambda",
                                "application", "await",  "await_convert", "async"};
  CHECK(std::set<std::string>(names.begin(), names.end()) == want);
  for (const auto& n : names) {
    CAPTURE(n);
    std::string diff = golden_mismatch(n);
    CHECK_MESSAGE(diff.empty(), diff);
  }
}

TEST_CASE("pure try collapses to pure") {
  Compiled c = compile(fixture("try_pure"));
  Program want = parse_program("cps[result] { F.pure(try { 1 } catch e => { 2 } finally { tick(\"finally\") }) }");
  CHECK(struct_eq(want, c.transformed));
}

TEST_CASE("trivial body") {
  Compiled c = compile(fixture("trivial"));
  CHECK(pretty(c.transformed) == "cps[ident] { F.pure(42) }\n");
}

TEST_CASE("bind counts") {
  auto st = [](const std::string& name) { return stats(typecheck(parse_program(fixture(name))).program); };
  Stats s = st("straight_line");
  CHECK(s.awaits == 3);
  CHECK(s.optimized_binds == 3);
  CHECK(s.binds > s.optimized_binds);
  Stats p = st("pure");
  CHECK(p.awaits == 0);
  CHECK(p.optimized_binds == 0);
  Stats n = st("nested_if");
  CHECK(n.awaits == 4);
  CHECK(n.optimized_binds == 4);
  CHECK(n.text() == "awaits=4 binds=20 optimized_binds=4");
}

TEST_CASE("unoptimized transform is observationally equal") {
  PipelineOptions po;
  po.optimize = false;
  for (const char* name : {"straight_line", "nested_if", "while_sum", "try_success", "try_failure", "copy_file"}) {
    CAPTURE(name);
    Observable a = run_fixture(name);
    Observable b = run_fixture(name, po);
    CHECK(a.same_result(b));
  }
}

TEST_CASE("trace names the rules") {
  PipelineOptions po;
  po.trace = true;
  Compiled c = compile(fixture("straight_line"), po);
  std::string t = format_trace(c.trace);
  CHECK(t.find("1:1 async") != std::string::npos);
  CHECK(t.find(" val") != std::string::npos);
  CHECK(t.find(" await") != std::string::npos);
}

TEST_CASE("earlier operands keep their value across a later effect") {
  std::string src =
      "async[ident] {\n  var n = 1;\n  val r = n + await(async[ident] { n = 10; 5 });\n  r\n}\n";
  CHECK(run_source(src).text() == "6\n");
  CHECK(compare(parse_program(src)).equivalent);
}

TEST_CASE("awaiting an unsupported conversion is a type error") {
  CHECK_THROWS_AS(compile("async[option] { await(choose([1, 2])) }"), Error);
}
