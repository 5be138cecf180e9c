#pragma once

#include <string>
#include <vector>

#include "cpsforge/ast.hpp"
#include "cpsforge/shiftlib.hpp"
#include "cpsforge/typer.hpp"

namespace cpsforge {

struct TransformOptions {
  bool optimize = true;
  /// Coloring runs as a separate pre-pass (see coloring.hpp); the flag is
  /// carried here for the pipeline.
  bool coloring = false;
  bool trace = false;
};

struct RuleApp {
  int node_id = 0;
  Span span;
  std::string rule;
};

struct CpsResult {
  ExprPtr transformed;
  bool trivial = false;
  std::vector<RuleApp> trace;
};

/// Translate the typed body of an `async[f]` block into monadic core form.
CpsResult transform(const ExprPtr& body, const std::string& f, const TransformOptions& opts = {},
                    const ShiftRegistry& reg = ShiftRegistry::builtin());

/// Replace every outermost async block of a typed program by its translation.
Program transform_program(const Program& typed, const TransformOptions& opts = {},
                          const ShiftRegistry& reg = ShiftRegistry::builtin(), std::vector<RuleApp>* trace = nullptr);

/// Awaits of the current async body, not counting nested async blocks.
int count_awaits(const ExprPtr& body);
/// FlatMap, FlatMapTry and Map nodes, not counting nested cps blocks.
int count_binds(const ExprPtr& transformed);

/// One `<line>:<col> <rule>` line per application.
std::string format_trace(const std::vector<RuleApp>& trace);

}  // namespace cpsforge
