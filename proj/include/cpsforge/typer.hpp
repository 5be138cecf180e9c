#pragma once

#include <set>
#include <string>
#include <vector>

#include "cpsforge/ast.hpp"
#include "cpsforge/diagnostics.hpp"

namespace cpsforge {

struct AwaitInfo {
  int await_id = 0;
  std::string inner;  // G, monad of the awaited value
  std::string outer;  // F, monad of the enclosing async
  bool conversion_needed = false;
};

struct TypeOptions {
  /// Accept `F[T]` where `T` is expected inside `async[F]`, recording the
  /// offending node as an implicit await instead of failing. Used by coloring.
  bool lenient = false;
};

struct TypedProgram {
  Program program;
  std::vector<AwaitInfo> awaits;
  /// Ids of nodes whose `F[T]` value is consumed as `T` (lenient mode only).
  std::set<int> implicit_awaits;
};

/// Annotates every node with its type. Throws TypeError at the first error in
/// program order.
TypedProgram typecheck(const Program& p, const TypeOptions& opts = {});

/// True when `e` contains an Await that belongs to the enclosing async, i.e.
/// not hidden inside a nested async block.
bool has_await(const ExprPtr& e);

/// Monads whose async blocks may use throw and try.
bool has_error_channel(std::string_view monad);

/// Parameter positions of a builtin method that are by-name (evaluated lazily,
/// possibly never). Empty when the method has none.
std::vector<std::size_t> by_name_params(const TyPtr& recv, std::string_view method);

/// Builtin free functions known to the typer and evaluators.
bool is_builtin_function(std::string_view name);

}  // namespace cpsforge
