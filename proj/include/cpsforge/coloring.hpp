#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cpsforge/ast.hpp"
#include "cpsforge/typer.hpp"

namespace cpsforge {

enum class Verdict { CachedSync, PlainSync, Async, MixedError, ExternalMultiSyncError };

std::string verdict_name(Verdict v);
bool is_error(Verdict v);

struct VarReport {
  std::string name;
  Verdict verdict = Verdict::Async;
  int sync = 0;
  int async = 0;
  bool defined_inside = true;
  bool mutable_var = false;
  Span span;
};

struct DiscardRecord {
  Span span;
  std::string type;
  bool awaited = false;  // AwaitValueDiscard, otherwise a logged discard
};

struct ColorReport {
  std::vector<VarReport> vars;
  std::vector<DiscardRecord> discards;
  // node id -> index into vars, for definitions and uses
  std::map<int, std::size_t> defs;
  std::map<int, std::size_t> uses;
  bool has_errors() const;
  /// `<var> <verdict> sync=<n> async=<n>` per variable.
  std::string text() const;
};

/// Types whose values may be dropped by a block statement.
struct DiscardRegistry {
  std::set<std::string> value_types{"Unit", "Int", "Bool", "Str"};
  bool await_discard = true;
  bool allows(const TyPtr& t) const;
};

/// Classify the monadic variables of an async body. `implicit` holds the
/// node ids the lenient typer saw used as plain values.
ColorReport analyze(const ExprPtr& body, const std::string& f, const std::set<int>& implicit);

/// Insert awaits (and memoization for cached variables). Throws on error
/// verdicts, and on cached variables of a monad without memoization.
ExprPtr apply_coloring(const ExprPtr& body, const std::string& f, const ColorReport& report,
                       const std::set<int>& implicit);

/// Rewrite dropped block statements: await monadic ones, log registered value
/// types, reject the rest.
ExprPtr transform_discards(const ExprPtr& body, const std::string& f, const DiscardRegistry& reg = {},
                           std::vector<DiscardRecord>* records = nullptr);

struct ColoringResult {
  Program program;  // strict-typed colored program
  ColorReport report;
};

/// The whole pre-pass over every async block of `p`. With `report_only`
/// error verdicts do not throw and `program` is left empty.
ColoringResult color_program(const Program& p, const DiscardRegistry& reg = {}, bool report_only = false);

}  // namespace cpsforge
