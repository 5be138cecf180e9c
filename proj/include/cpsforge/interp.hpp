#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpsforge/ast.hpp"
#include "cpsforge/monads.hpp"
#include "cpsforge/shiftlib.hpp"

namespace cpsforge {

struct InterpOptions {
  /// Registry used to execute ShiftCall nodes; must match the one the
  /// program was transformed with. Null selects the builtin registry.
  const ShiftRegistry* registry = nullptr;
  /// Abort nondet enumeration beyond this many paths.
  std::size_t max_paths = 1000000;
};

/// Direct-style reference semantics: awaits are interpreted natively per
/// monad. `typed` is a type-checked surface program.
Observable oracle(const Program& typed, const InterpOptions& opts = {});

/// Monadic evaluation of transformer output through the monad kernel.
Observable eval(const Program& transformed, const InterpOptions& opts = {});

/// Evaluate a single closed expression under `eval` semantics inside
/// monad `f` (for kernel-level tests of core nodes).
Observable eval_expr(const ExprPtr& e, const std::string& f, const InterpOptions& opts = {});

/// Seeded generator of well-typed programs whose main is `async[f] { ... }`.
struct GenOptions {
  int budget = 4;
  /// Only val-defs and expression statements, awaits as whole val RHS or
  /// whole call arguments.
  bool straight_line = false;
};
/// The generated MiniCPS source text.
std::string gen_source(std::uint64_t seed, const std::string& f, const GenOptions& opts = {});
/// `gen_source`, parsed and type-checked.
Program gen_program(std::uint64_t seed, const std::string& f, const GenOptions& opts = {});

}  // namespace cpsforge
