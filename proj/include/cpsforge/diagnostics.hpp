#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "cpsforge/ast.hpp"

namespace cpsforge {

enum class ErrorKind {
  Parse,
  Type,
  ShiftResolution,
  Coloring,
  Discard,
  Memoization,
  UnsupportedPosition,
  Runtime,
  Kernel,
  Capability,
  Deadlock,
  PathExplosion,
};

std::string_view error_kind_name(ErrorKind k);

struct Diagnostic {
  ErrorKind kind = ErrorKind::Kernel;
  Span span;
  std::string message;
};

/// Every pipeline failure is reported by throwing an Error carrying a
/// Diagnostic; nothing is partially returned.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostic d) : std::runtime_error(d.message), diag_(std::move(d)) {}
  Error(ErrorKind k, Span s, std::string msg) : Error(Diagnostic{k, s, std::move(msg)}) {}

  const Diagnostic& diag() const { return diag_; }
  ErrorKind kind() const { return diag_.kind; }
  Span span() const { return diag_.span; }

 private:
  Diagnostic diag_;
};

class ParseError : public Error {
 public:
  ParseError(Span s, std::string msg, std::set<std::string> expected)
      : Error(ErrorKind::Parse, s, std::move(msg)), expected_(std::move(expected)) {}
  const std::set<std::string>& expected() const { return expected_; }

 private:
  std::set<std::string> expected_;
};

class TypeError : public Error {
 public:
  TypeError(Span s, std::string msg, TyPtr found = nullptr, TyPtr expected = nullptr)
      : Error(ErrorKind::Type, s, std::move(msg)), found_(std::move(found)), expected_(std::move(expected)) {}
  const TyPtr& found() const { return found_; }
  const TyPtr& expected() const { return expected_; }

 private:
  TyPtr found_;
  TyPtr expected_;
};

/// `<file>:<line>:<col>: <kind>: <message>`, with the kind highlighted when
/// `color` is set.
std::string format_diagnostic(const std::string& file, const Diagnostic& d, bool color);

}  // namespace cpsforge
