// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <iostream>
#include <set>

#include "../support/support.hpp"
#include "cpsforge/laws.hpp"

using namespace cpsforge;
using namespace cpsforge::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

std::vector<std::string> resolutions(const std::string& src) {
  PipelineOptions po;
  po.trace = true;
  std::vector<std::string> out;
  for (const auto& r : compile(src, po).trace)
    if (r.rule.rfind("application ", 0) == 0) out.push_back(r.rule.substr(12));
  return out;
}

bool has(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

PipelineOptions colored() {
  PipelineOptions po;
  po.coloring = true;
  return po;
}

const std::vector<std::string> kMonads = {"ident", "option", "result", "nondet"};

Check goldens() {
  Check c;
  auto t0 = Clock::now();
  auto names = golden_names();
  c.require(names.size() == 16, "expected 16 golden fixtures, found " + std::to_string(names.size()));
  int matched = 0;
  for (const auto& n : names) {
    std::string d = golden_mismatch(n);
    c.require(d.empty(), n + " differs");
    if (d.empty()) matched++;
  }
  double t = seconds_since(t0);
  c.require(t < 5.0, "took " + secs(t));
  if (c.ok) c.detail = std::to_string(matched) + "/16 goldens match in " + secs(t);
  return c;
}

struct Sweeps {
  SweepResult total;
  double seconds = 0;
  SweepResult straight;
};

Sweeps run_sweeps() {
  Sweeps s;
  auto t0 = Clock::now();
  for (const auto& f : kMonads) {
    SweepResult r = sweep(f, 500, 6);
    s.total.runs += r.runs;
    s.total.mismatches += r.mismatches;
    s.total.opt_mismatches += r.opt_mismatches;
    if (s.total.first.empty()) s.total.first = r.first;
  }
  s.seconds = seconds_since(t0);
  for (const auto& f : kMonads) {
    SweepResult r = sweep(f, 500, 6, true, 100000);
    s.straight.runs += r.runs;
    s.straight.mismatches += r.mismatches;
    s.straight.bind_mismatches += r.bind_mismatches;
  }
  return s;
}

Check equivalence(const Sweeps& s) {
  Check c;
  c.require(s.total.runs == 2000, "ran " + std::to_string(s.total.runs));
  c.require(s.total.mismatches == 0, std::to_string(s.total.mismatches) + " mismatches, first " + s.total.first);
  c.require(s.seconds < 60.0, "took " + secs(s.seconds));
  if (c.ok) c.detail = "2000/2000 equivalent in " + secs(s.seconds);
  return c;
}

Check optimizer(const Sweeps& s) {
  Check c;
  c.require(s.total.opt_mismatches == 0, std::to_string(s.total.opt_mismatches) + " optimized/unoptimized differences");
  c.require(s.straight.mismatches == 0, "straight-line corpus has oracle mismatches");
  c.require(s.straight.bind_mismatches == 0,
            std::to_string(s.straight.bind_mismatches) + " straight-line programs with binds != awaits");
  if (c.ok)
    c.detail = "opt == noopt on 2000 runs; binds == awaits on " + std::to_string(s.straight.runs) + " straight-line";
  return c;
}

Check while_loops() {
  Check c;
  long sum = 0;
  for (int i = 1; i <= 10; ++i) sum += i;
  c.require(run_fixture("while_sum").text() == "Ok " + std::to_string(sum) + "\n", "while_sum");
  c.require(run_fixture("while_long").text() == "Ok 100000\n", "while_long");
  if (c.ok) c.detail = "Ok 55, 10^5 iterations completed";
  return c;
}

Check try_catch() {
  Check c;
  c.require(run_fixture("try_boom").text() == "Err boom\n", "try_boom");
  Observable s = run_fixture("try_success");
  c.require(s.counters["finally"] == 1, "finally count on success");
  Observable f = run_fixture("try_failure");
  c.require(f.counters["finally"] == 1, "finally count on failure");
  Program want = parse_program("cps[result] { F.pure(try { 1 } catch e => { 2 } finally { tick(\"finally\") }) }");
  c.require(struct_eq(want, compile(fixture("try_pure")).transformed), "pure try not collapsed");
  if (c.ok) c.detail = "Err boom; finally once on both paths; pure try is Pure";
  return c;
}

Check higher_order() {
  Check c;
  c.require(has(resolutions(fixture("ho_cache")), "asyncShift-fo"), "Cache.getOrUpdate");
  c.require(has(resolutions(fixture("ho_exists")), "asyncShift-o"), "List.exists");
  c.require(has(resolutions(fixture("ho_box")), "inplace-f"), "Box.mapAsync");
  c.require(has(resolutions("async[option] { [1, 2].fold(await(some(0)), fun(a: Int, b: Int) => a + b) }"),
                "unchanged"),
            "pure lambda");
  c.require(has(resolutions(fixture("ho_monadic")), "monadic"), "monadic lambda");
  c.require(run_fixture("ho_cache").text() == "Ok 20\n", "ho_cache result");
  c.require(run_fixture("ho_exists").text() == "Some true\n", "ho_exists result");
  c.require(run_fixture("ho_box").text() == "Some 42\n", "ho_box result");
  c.require(run_fixture("ho_pure_lambda").text() == "Some [3, 6, 9]\n", "ho_pure_lambda result");
  c.require(run_fixture("ho_monadic").text() == "Some 7\n", "ho_monadic result");
  bool rejected = false;
  try {
    compile(fixture("unregistered_ho"));
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::ShiftResolution;
  }
  c.require(rejected, "unregistered call accepted");
  std::vector<std::string> srcs = {
      list_ops_source("ident", "pure_ident"), list_ops_source("option", "some"), list_ops_source("result", "ok"),
      "def choose1(v: Int): nondet[Int] = { choose([v, v + 1]) }\n" + list_ops_source("nondet", "choose1")};
  for (const auto& src : srcs) c.require(compare(parse_program(src)).equivalent, "list ops differ from oracle");
  if (c.ok) c.detail = "fo, o, inplace, unchanged, monadic, unregistered; list ops under 4 monads";
  return c;
}

Check callchain() {
  Check c;
  Observable fused = run_fixture("callchain");
  PipelineOptions po;
  po.callchain = false;
  Observable plain = run_fixture("callchain", po);
  c.require(fused.visits == 100, "fused visits " + std::to_string(fused.visits));
  c.require(plain.visits == 150, "unfused visits " + std::to_string(plain.visits));
  c.require(fused.same_result(plain), "results differ");
  if (c.ok) c.detail = "visits 100 fused, 150 unfused, same result";
  return c;
}

Check coloring() {
  Check c;
  auto verdict = [](const std::string& name) {
    ColoringResult r = color_program(parse_program(fixture(name)), {}, true);
    return r.report.vars.empty() ? std::string("none") : verdict_name(r.report.vars[0].verdict);
  };
  c.require(verdict("color_cached") == "CachedSync", "color_cached");
  c.require(verdict("color_async") == "Async", "color_async");
  c.require(verdict("color_mixed") == "MixedError", "color_mixed");
  c.require(verdict("color_external") == "ExternalMultiSyncError", "color_external");
  c.require(run_fixture("copy_file").text() == run_fixture("copy_file_colored", colored()).text(),
            "colored copy-file differs");
  c.require(run_fixture("color_eventual", colored()).counters["job"] == 1, "eventual counter");
  ColoringResult d = color_program(parse_program(fixture("discard_await")));
  c.require(d.report.discards.size() == 1 && d.report.discards[0].awaited, "await on discard");
  bool rejected = false;
  try {
    color_program(parse_program(fixture("discard_error")));
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::Discard;
  }
  c.require(rejected, "discard error");
  if (c.ok) c.detail = "4 verdicts, copy-file equal, counter 1, discard fixtures";
  return c;
}

Check worked_examples() {
  Check c;
  Observable o = run_fixture("copy_file");
  c.require(o.result == "Ok " + std::to_string(copy_bytes(10240, 1024)), "copy-file bytes: " + o.result);
  c.require(o.finalizers == std::vector<std::string>{"output", "input"}, "finalizer order");
  std::string counts;
  for (int n : {4, 5, 6}) {
    int got = static_cast<int>(run_source(queens_source(n)).paths.size());
    c.require(got == queens_count(n), "N=" + std::to_string(n) + " gave " + std::to_string(got));
    counts += (counts.empty() ? "" : ", ") + std::to_string(n) + "->" + std::to_string(got);
  }
  if (c.ok) c.detail = "copy-file Ok 10240 [output, input]; queens " + counts;
  return c;
}

Check laws() {
  Check c;
  for (const auto& d : all_monads()) {
    LawReport r = check_monad_laws(d.id, 200, 2024);
    c.require(r.cases == 200 && r.ok(), r.first_failure);
  }
  if (c.ok) c.detail = "3 laws x 200 cases x " + std::to_string(all_monads().size()) + " monads";
  return c;
}

Check roundtrip() {
  Check c;
  int good = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    GenOptions go;
    go.budget = 6;
    go.straight_line = s % 5 == 4;
    Program p = gen_program(s, kMonads[s % 4], go);
    std::string text = pretty(p);
    Program q = parse_program(text);
    bool ok = struct_eq(p, q) && pretty(q) == text;
    c.require(ok, "seed " + std::to_string(s));
    good += ok;
  }
  if (c.ok) c.detail = std::to_string(good) + "/1000 programs";
  return c;
}

template <typename F>
Check guarded(F f) {
  try {
    return f();
  } catch (const std::exception& e) {
    Check c;
    c.require(false, std::string("exception: ") + e.what());
    return c;
  }
}

}  // namespace

int main() {
  Sweeps sw;
  bool sweep_ok = true;
  std::string sweep_err;
  try {
    sw = run_sweeps();
  } catch (const std::exception& e) {
    sweep_ok = false;
    sweep_err = e.what();
  }
  auto from_sweep = [&](auto f) {
    if (sweep_ok) return f(sw);
    Check c;
    c.require(false, "exception: " + sweep_err);
    return c;
  };
  std::vector<Check> results = {
      guarded(goldens),      from_sweep(equivalence), from_sweep(optimizer), guarded(while_loops),
      guarded(try_catch),    guarded(higher_order),   guarded(callchain),    guarded(coloring),
      guarded(worked_examples), guarded(laws),        guarded(roundtrip)};
  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::cout << "criterion " << i + 1 << ": " << (results[i].ok ? "PASS" : "FAIL") << " " << results[i].detail
              << "\n";
    failed += !results[i].ok;
  }
  return failed ? 1 : 0;
}
