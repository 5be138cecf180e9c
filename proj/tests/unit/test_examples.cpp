#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

namespace {
PipelineOptions colored() {
  PipelineOptions po;
  po.coloring = true;
  return po;
}
}  // namespace

TEST_CASE("copy-file moves every byte and releases in reverse order") {
  Observable o = run_fixture("copy_file");
  CHECK(o.result == "Ok " + std::to_string(copy_bytes(10240, 1024)));
  CHECK(o.finalizers == std::vector<std::string>{"output", "input"});
  CHECK(o.text() == "Ok 10240\nfinalizers: output, input\n");
}

TEST_CASE("n-queens path counts match backtracking") {
  for (int n : {4, 5, 6}) {
    CAPTURE(n);
    Observable o = run_source(queens_source(n));
    CHECK(static_cast<int>(o.paths.size()) == queens_count(n));
  }
}

TEST_CASE("while loops") {
  long sum = 0;
  for (int i = 1; i <= 10; ++i) sum += i;
  CHECK(run_fixture("while_sum").text() == "Ok " + std::to_string(sum) + "\n");
  CHECK(run_fixture("while_long").text() == "Ok 100000\n");
}

TEST_CASE("try, catch and finally") {
  CHECK(run_fixture("try_boom").text() == "Err boom\n");
  Observable s = run_fixture("try_success");
  CHECK(s.text() == "Ok 5\n");
  CHECK(s.counters["finally"] == 1);
  Observable f = run_fixture("try_failure");
  CHECK(f.text() == "Ok 4\n");
  CHECK(f.counters["finally"] == 1);
}

TEST_CASE("option short circuit") { CHECK(run_fixture("option_short_circuit").text() == "None\n"); }

TEST_CASE("higher-order fixtures") {
  CHECK(run_fixture("ho_cache").text() == "Ok 20\n");
  CHECK(run_fixture("ho_exists").text() == "Some true\n");
  CHECK(run_fixture("ho_box").text() == "Some 42\n");
  CHECK(run_fixture("ho_pure_lambda").text() == "Some [3, 6, 9]\n");
  CHECK(run_fixture("ho_monadic").text() == "Some 7\n");
  CHECK(run_fixture("ho_lists").paths.size() == 8);
}

TEST_CASE("call-chain fusion visits each element once") {
  Observable fused = run_fixture("callchain");
  PipelineOptions po;
  po.callchain = false;
  Observable plain = run_fixture("callchain", po);
  CHECK(fused.visits == 100);
  CHECK(plain.visits == 150);
  CHECK(fused.same_result(plain));
  CHECK(fused.text() == "Some 50\n");
}

TEST_CASE("colored copy-file equals the explicit version") {
  Observable a = run_fixture("copy_file");
  Observable b = run_fixture("copy_file_colored", colored());
  CHECK(a.same_result(b));
  CHECK(a.text() == b.text());
}

TEST_CASE("colored fixtures run") {
  CHECK(run_fixture("color_cached", colored()).text() == "Some 42\n");
  CHECK(run_fixture("color_async", colored()).text() == "Some 21\n");
  Observable ev = run_fixture("color_eventual", colored());
  CHECK(ev.text() == "Ok 42\n");
  CHECK(ev.counters["job"] == 1);
  CHECK(run_fixture("discard_await", colored()).text() == "None\n");
}

TEST_CASE("every fixture agrees with the oracle") {
  for (const char* name : {"copy_file", "nqueens", "while_sum", "try_boom", "try_success", "try_failure",
                           "option_short_circuit", "ho_cache", "ho_exists", "ho_box", "ho_pure_lambda",
                           "ho_monadic", "ho_lists", "callchain", "straight_line", "nested_if", "pure"}) {
    CAPTURE(name);
    CHECK(compare(parse_program(fixture(name))).equivalent);
  }
}
