#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

namespace {

std::vector<std::string> resolutions(const std::string& src) {
  PipelineOptions po;
  po.trace = true;
  std::vector<std::string> out;
  for (const auto& r : compile(src, po).trace)
    if (r.rule.rfind("application ", 0) == 0) out.push_back(r.rule.substr(12));
  return out;
}

using Strs = std::vector<std::string>;

}  // namespace

TEST_CASE("tags of the higher-order fixtures") {
  CHECK(resolutions(fixture("ho_cache")) == Strs{"asyncShift-fo", "asyncShift-fo"});
  CHECK(resolutions(fixture("ho_exists")) == Strs{"asyncShift-o"});
  CHECK(resolutions(fixture("ho_box")) == Strs{"inplace-f"});
  CHECK(resolutions(fixture("ho_monadic")) == Strs{"monadic"});
  CHECK(resolutions("async[option] { [1, 2].fold(await(some(0)), fun(a: Int, b: Int) => a + b) }") ==
        Strs{"unchanged"});
}

TEST_CASE("pure lambda call is left unchanged") {
  Compiled c = compile(fixture("ho_pure_lambda"));
  CHECK(pretty(c.transformed).find("F.pure([1, 2, 3].map(fun(x: Int) => x * k))") != std::string::npos);
}

TEST_CASE("resolve directly") {
  ShiftRegistry reg = ShiftRegistry::builtin();
  TyPtr list = Ty::list(Ty::int_());
  CHECK(resolution_name(resolve(reg, list, "map", {false}, {false}, "option")) == "unchanged");
  CHECK(resolution_name(resolve(reg, list, "map", {true}, {true}, "option")) == "monadic");
  CHECK(resolution_name(resolve(reg, list, "map", {true}, {false}, "option")) == "asyncShift-fo");
  CHECK(resolution_name(resolve(reg, list, "exists", {true}, {false}, "option")) == "asyncShift-o");
  CHECK_THROWS_AS(resolve(reg, Ty::receiver("Range"), "map", {true}, {false}, "option"), Error);
}

TEST_CASE("unregistered higher-order call is rejected") {
  try {
    compile(fixture("unregistered_ho"));
    FAIL("expected a shift resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShiftResolution);
    CHECK(std::string(e.what()).find("Range.map") != std::string::npos);
  }
}

TEST_CASE("shifted list operations follow direct semantics") {
  CHECK(run_source(list_ops_source("ident", "pure_ident")).text() == "14\n");
  CHECK(run_source(list_ops_source("option", "some")).text() == "Some 14\n");
  CHECK(run_source(list_ops_source("result", "ok")).text() == "Ok 14\n");
  std::string nd = "def choose1(v: Int): nondet[Int] = { choose([v, v + 1]) }\n" + list_ops_source("nondet", "choose1");
  CHECK(run_source(nd).paths.size() == 2240);
  for (const std::string& src : {list_ops_source("ident", "pure_ident"), list_ops_source("option", "some"),
                                 list_ops_source("result", "ok"), nd}) {
    CHECK(compare(parse_program(src)).equivalent);
  }
}

TEST_CASE("shifted operations stop at the first failure") {
  std::string pre = "def half(v: Int): option[Int] = { if v % 2 == 0 then some(v / 2) else none_of(0) }\n";
  CHECK(run_source(pre + list_ops_source("option", "half")).text() == "None\n");
  std::string cnt =
      "async[option] { [1, 2, 3, 4].map(fun(x: Int) => { tick(\"v\"); await(if x < 2 then some(x) else none_of(0)) }) }";
  Observable o = run_source(cnt);
  CHECK(o.text() == "None\n");
  CHECK(o.counters["v"] == 2);
  CHECK(compare(parse_program(cnt)).equivalent);
}
