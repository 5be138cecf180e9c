#pragma once

#include <string_view>

#include "cpsforge/ast.hpp"
#include "cpsforge/diagnostics.hpp"

namespace cpsforge {

/// Parse MiniCPS source (LF or CRLF, `//` line comments). Throws ParseError at
/// the first failure; never returns a partial program.
///
/// Besides the surface grammar the parser accepts the monadic core notation
/// produced by `pretty` on transformed trees (`F.pure(e)`,
/// `F.flatMap(fa)(x => e)`, `cps[m] { ... }`, ...), which is how golden shapes
/// are written in tests.
Program parse_program(std::string_view text);

/// Parse a single expression (the `main` part only, no defs).
ExprPtr parse_expr(std::string_view text);

}  // namespace cpsforge
