#include "cpsforge/diagnostics.hpp"

namespace cpsforge {

std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Type: return "type error";
    case ErrorKind::ShiftResolution: return "shift resolution error";
    case ErrorKind::Coloring: return "coloring error";
    case ErrorKind::Discard: return "discard error";
    case ErrorKind::Memoization: return "memoization unsupported";
    case ErrorKind::UnsupportedPosition: return "unsupported position";
    case ErrorKind::Runtime: return "runtime error";
    case ErrorKind::Kernel: return "kernel fault";
    case ErrorKind::Capability: return "capability error";
    case ErrorKind::Deadlock: return "deadlock";
    case ErrorKind::PathExplosion: return "path explosion";
  }
  return "error";
}

std::string format_diagnostic(const std::string& file, const Diagnostic& d, bool color) {
  std::string kind(error_kind_name(d.kind));
  if (color) kind = "\x1b[1;31m" + kind + "\x1b[0m";
  return file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": " + kind +
         ": " + d.message;
}

}  // namespace cpsforge
