#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cpsforge/coloring.hpp"
#include "cpsforge/cps.hpp"
#include "cpsforge/interp.hpp"
#include "cpsforge/shiftlib.hpp"

namespace cpsforge {

struct PipelineOptions {
  bool optimize = true;
  bool callchain = true;
  bool coloring = false;
  bool trace = false;
  /// Applied to the transformed program before evaluation. Test-only.
  std::function<Program(const Program&)> mutate;
};

struct Compiled {
  Program typed;        // after typing (and coloring)
  Program transformed;
  std::vector<RuleApp> trace;
  ColorReport color;
  ShiftRegistry registry;
};

/// parse, typecheck or color, transform
Compiled compile(const std::string& source, const PipelineOptions& opts = {});
Compiled compile(const Program& parsed, const PipelineOptions& opts = {});

struct Stats {
  int awaits = 0;
  int binds = 0;            // unoptimized transform
  int optimized_binds = 0;
  std::string text() const;
};

/// Bind and await counts summed over every async block of a typed program.
Stats stats(const Program& typed, const PipelineOptions& opts = {});

struct Comparison {
  Observable oracle;
  Observable eval;
  bool equivalent = false;
  Compiled compiled;
};

/// Oracle on the typed program versus eval of its transform.
Comparison compare(const Program& parsed, const PipelineOptions& opts = {});

/// Greedy shrinking: drop block statements and unused val-defs while
/// `failing` keeps returning true. `failing` must reject ill-typed programs.
Program minimize(const Program& parsed, const std::function<bool(const Program&)>& failing,
                 int max_steps = 200);

}  // namespace cpsforge
