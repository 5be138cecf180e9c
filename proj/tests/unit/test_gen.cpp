#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

TEST_CASE("generator is deterministic and well typed") {
  for (const char* f : {"ident", "option", "result", "nondet"}) {
    CAPTURE(f);
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::string a = gen_source(s, f, {6, false});
      CHECK(a == gen_source(s, f, {6, false}));
      CHECK(a.find("async[" + std::string(f) + "]") != std::string::npos);
      CHECK_NOTHROW(typecheck(parse_program(a)));
    }
    CHECK(gen_source(1, f) != gen_source(2, f));
  }
}

TEST_CASE("pretty then parse is the identity") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Program p = gen_program(s, s % 2 ? "result" : "nondet", {6, s % 3 == 0});
    std::string text = pretty(p);
    Program q = parse_program(text);
    CHECK(struct_eq(p, q));
    CHECK(pretty(q) == text);
    Program t = compile(p).transformed;
    CHECK(struct_eq(parse_program(pretty(t)), t));
  }
}

TEST_CASE("small sweep") {
  for (const char* f : {"ident", "option", "result", "nondet"}) {
    SweepResult r = sweep(f, 40, 5, false, 1000);
    CHECK_MESSAGE(r.mismatches == 0, r.first);
    CHECK(r.opt_mismatches == 0);
  }
  SweepResult sl = sweep("option", 40, 6, true, 77);
  CHECK(sl.bind_mismatches == 0);
}

TEST_CASE("straight-line programs have no control flow") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::string src = gen_source(s, "result", {6, true});
    CHECK(src.find("while") == std::string::npos);
    CHECK(src.find("if ") == std::string::npos);
    CHECK(src.find("try") == std::string::npos);
  }
}

TEST_CASE("minimize shrinks a failing program") {
  PipelineOptions po;
  po.mutate = [](const Program& p) {
    Program out = p;
    out.main = mk::async("option", mk::block({mk::int_(0)}));
    return out;
  };
  Program p = parse_program("async[option] { val a = await(some(1)); val c = await(some(5)); tick(\"t\"); a + 2 }");
  auto failing = [&](const Program& c) {
    try {
      return !compare(c, po).equivalent;
    } catch (const Error&) {
      return false;
    }
  };
  REQUIRE(failing(p));
  Program small = minimize(p, failing);
  CHECK(failing(small));
  CHECK(pretty(small).size() < pretty(p).size());
}
