#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cpsforge/parser.hpp"
#include "cpsforge/pipeline.hpp"

namespace cpsforge::testing {

inline std::string programs_dir() { return CPSFORGE_PROGRAMS_DIR; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) { return read_text(programs_dir() + "/" + name + ".mcps"); }

inline Observable run_source(const std::string& src, const PipelineOptions& po = {}) {
  Compiled c = compile(src, po);
  InterpOptions io;
  io.registry = &c.registry;
  return eval(c.transformed, io);
}

inline Observable run_fixture(const std::string& name, const PipelineOptions& po = {}) {
  return run_source(fixture(name), po);
}

inline std::vector<std::string> golden_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(programs_dir() + "/golden"))
    if (e.path().extension() == ".mcps") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

/// Empty when the transform of golden/<name>.mcps matches golden/<name>.golden.
inline std::string golden_mismatch(const std::string& name) {
  std::string base = programs_dir() + "/golden/" + name;
  Compiled c = compile(read_text(base + ".mcps"));
  Program want = parse_program(read_text(base + ".golden"));
  if (struct_eq(want, c.transformed)) return {};
  return "got:\n" + pretty(c.transformed) + "\nwant:\n" + pretty(want);
}

/// Classical backtracking count of N-Queens placements.
inline int queens_count(int n) {
  std::vector<int> cols;
  std::function<int()> go = [&]() -> int {
    int row = static_cast<int>(cols.size());
    if (row == n) return 1;
    int total = 0;
    for (int c = 0; c < n; ++c) {
      bool ok = true;
      for (int r = 0; r < row && ok; ++r)
        ok = cols[r] != c && std::abs(cols[r] - c) != row - r;
      if (!ok) continue;
      cols.push_back(c);
      total += go();
      cols.pop_back();
    }
    return total;
  };
  return go();
}

/// Bytes moved by a read-until-short-buffer loop.
inline long copy_bytes(long size, long buf) {
  long pos = 0, total = 0;
  for (;;) {
    long c = std::min(buf, size - pos);
    pos += c;
    total += c;
    if (c != buf) return total;
  }
}

inline std::string queens_source(int n) {
  std::string src = fixture("nqueens");
  auto at = src.find("place(6,");
  src.replace(at, 8, "place(" + std::to_string(n) + ",");
  return src;
}

/// A map/filter/fold pipeline whose lambdas await an `eff(v)` of monad `f`.
inline std::string list_ops_source(const std::string& f, const std::string& eff) {
  return "async[" + f + "] {\n  val ys = [1, 2, 3, 4].map(fun(x: Int) => await(" + eff + "(x)) * 2);\n" +
         "  val zs = ys.filter(fun(y: Int) => await(" + eff + "(y)) > 4);\n" +
         "  zs.fold(0, fun(a: Int, z: Int) => a + await(" + eff + "(z)))\n}\n";
}

struct SweepResult {
  int runs = 0;
  int mismatches = 0;
  int opt_mismatches = 0;
  int bind_mismatches = 0;
  std::string first;
};

/// Oracle vs optimized and unoptimized transforms over generated programs.
inline SweepResult sweep(const std::string& f, int count, int budget, bool straight_line = false,
                         std::uint64_t seed = 0) {
  SweepResult r;
  GenOptions go;
  go.budget = budget;
  go.straight_line = straight_line;
  PipelineOptions noopt;
  noopt.optimize = false;
  for (int i = 0; i < count; ++i) {
    Program p = parse_program(gen_source(seed + static_cast<std::uint64_t>(i), f, go));
    Comparison c = compare(p);
    Comparison u = compare(p, noopt);
    r.runs++;
    if (!c.equivalent) {
      r.mismatches++;
      if (r.first.empty()) r.first = f + " seed " + std::to_string(seed + i) + ": " + c.oracle.text() + " vs " + c.eval.text();
    }
    if (!u.equivalent || !c.eval.same_result(u.eval)) r.opt_mismatches++;
    if (straight_line) {
      Stats s = stats(c.compiled.typed);
      if (s.awaits != s.optimized_binds) r.bind_mismatches++;
    }
  }
  return r;
}

}  // namespace cpsforge::testing
