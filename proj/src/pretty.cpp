#include <sstream>

#include "cpsforge/ast.hpp"

namespace cpsforge {

namespace {

// Binding strength of each printed form. Forms below the context's minimum
// are parenthesised.
constexpr int kSeq = -1;  // val/var sequences: only bare in statement position
constexpr int kLow = 0;   // if, while, match, try, throw, fun, assignment
constexpr int kPostfix = 6;
constexpr int kPrimary = 7;

int binary_prec(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=") return 3;
  if (op == "+" || op == "-") return 4;
  return 5;
}

bool is_binary(const Expr& e) {
  return e.kind == ExprKind::MethodCall && e.kids.size() == 2 && !binary_op_for(e.name).empty();
}

int prec_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::ValDef:
    case ExprKind::VarDef: return kSeq;
    case ExprKind::Assign:
    case ExprKind::If:
    case ExprKind::While:
    case ExprKind::Match:
    case ExprKind::Try:
    case ExprKind::Throw:
    case ExprKind::Lambda: return kLow;
    case ExprKind::MethodCall:
      if (is_binary(e)) return binary_prec(binary_op_for(e.name));
      return kPostfix;
    case ExprKind::Lit:
      if (auto* i = std::get_if<std::int64_t>(&e.lit); i && *i < 0) return kPostfix;
      return kPrimary;
    default: return kPrimary;
  }
}

std::string escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

class Printer {
 public:
  std::string out;

  void expr(const ExprPtr& e, int min_prec) {
    if (!e) {
      out += "<null>";
      return;
    }
    bool parens = prec_of(*e) < min_prec;
    if (parens) out += "(";
    if (e->kind == ExprKind::ValDef || e->kind == ExprKind::VarDef)
      seq(e);
    else
      bare(*e);
    if (parens) out += ")";
  }

  /// Statement-position rendering: a val/var chain prints as `val x = e; rest`
  /// with a multi-statement `rest` spliced into the enclosing sequence.
  void seq(const ExprPtr& e) {
    if (e->kind == ExprKind::ValDef || e->kind == ExprKind::VarDef) {
      out += e->kind == ExprKind::ValDef ? "val " : "var ";
      out += e->name + " = ";
      expr(e->kid(0), 1);
      out += "; ";
      const auto& rest = e->kid(1);
      if (rest->kind == ExprKind::Block && rest->kids.size() >= 2)
        stmts(rest->kids);
      else
        seq(rest);
      return;
    }
    expr(e, kLow);
  }

  void stmts(const std::vector<ExprPtr>& ss) {
    for (std::size_t i = 0; i < ss.size(); ++i) {
      if (i) out += "; ";
      if (i + 1 == ss.size())
        seq(ss[i]);
      else
        expr(ss[i], kLow);
    }
  }

  void braced(const ExprPtr& e) {
    if (e->kind == ExprKind::Block) {
      bare(*e);
      return;
    }
    out += "{ ";
    seq(e);
    out += " }";
  }

  void args(const std::vector<ExprPtr>& kids, std::size_t from) {
    out += "(";
    for (std::size_t i = from; i < kids.size(); ++i) {
      if (i > from) out += ", ";
      expr(kids[i], kLow);
    }
    out += ")";
  }

  void params(const std::vector<Param>& ps) {
    out += "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) out += ", ";
      out += ps[i].name;
      if (ps[i].ty) out += ": " + show_ty(ps[i].ty);
    }
    out += ")";
  }

  void bare(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Lit: out += pretty_literal(e.lit); break;
      case ExprKind::Var: out += e.name; break;
      case ExprKind::Block:
        out += "{ ";
        stmts(e.kids);
        out += " }";
        break;
      case ExprKind::ValDef:
      case ExprKind::VarDef: break;  // handled by seq()
      case ExprKind::Assign:
        out += e.name + " = ";
        expr(e.kid(0), kLow);
        break;
      case ExprKind::If:
        out += "if ";
        expr(e.kid(0), 1);
        out += " then ";
        expr(e.kid(1), 1);
        out += " else ";
        expr(e.kid(2), kLow);
        break;
      case ExprKind::While:
        out += "while ";
        expr(e.kid(0), 1);
        out += " do ";
        expr(e.kid(1), kLow);
        break;
      case ExprKind::Match:
        out += "match ";
        expr(e.kid(0), 1);
        out += " {";
        for (std::size_t i = 0; i < e.pats.size(); ++i) {
          out += " case " + pretty_pattern(e.pats[i]) + " => ";
          expr(e.kid(i + 1), 1);
        }
        out += " }";
        break;
      case ExprKind::Try:
        out += "try ";
        braced(e.kid(0));
        if (e.kid(1)) {
          out += " catch " + e.name + " => ";
          braced(e.kid(1));
        }
        if (e.kid(2)) {
          out += " finally ";
          braced(e.kid(2));
        }
        break;
      case ExprKind::Throw:
        out += "throw ";
        expr(e.kid(0), kLow);
        break;
      case ExprKind::Lambda:
        out += "fun";
        params(e.params);
        out += " => ";
        expr(e.kid(0), kLow);
        break;
      case ExprKind::Apply:
        if (e.kid(0)->kind == ExprKind::Var && e.kid(0)->name == "list") {
          out += "[";
          for (std::size_t i = 1; i < e.kids.size(); ++i) {
            if (i > 1) out += ", ";
            expr(e.kids[i], kLow);
          }
          out += "]";
          break;
        }
        expr(e.kid(0), kPrimary);
        args(e.kids, 1);
        break;
      case ExprKind::MethodCall:
        if (is_binary(e)) {
          int p = binary_prec(binary_op_for(e.name));
          expr(e.kid(0), p);
          out += " ";
          out += binary_op_for(e.name);
          out += " ";
          expr(e.kid(1), p + 1);
        } else {
          expr(e.kid(0), kPostfix);
          out += "." + e.name;
          args(e.kids, 1);
        }
        break;
      case ExprKind::Await:
        out += "await(";
        expr(e.kid(0), kLow);
        out += ")";
        break;
      case ExprKind::Async:
        out += "async[" + e.name + "] ";
        braced(e.kid(0));
        break;
      case ExprKind::Pure: core1("pure", e.kid(0)); break;
      case ExprKind::FlatMap:
      case ExprKind::Map:
        out += e.kind == ExprKind::FlatMap ? "F.flatMap(" : "F.map(";
        expr(e.kid(0), kLow);
        out += ")(" + e.name + " => ";
        expr(e.kid(1), kLow);
        out += ")";
        break;
      case ExprKind::FlatMapTry:
        out += "F.flatMapTry(";
        expr(e.kid(0), kLow);
        out += ") { case Success(" + e.name + ") => ";
        expr(e.kid(1), 1);
        out += " case Failure(" + e.name2 + ") => ";
        expr(e.kid(2), 1);
        out += " }";
        break;
      case ExprKind::MonadError: core1("error", e.kid(0)); break;
      case ExprKind::AdoptAwait: core1("adoptAwait", e.kid(0)); break;
      case ExprKind::Convert:
        out += "F.convert[" + e.name + ", " + e.name2 + "](";
        expr(e.kid(0), kLow);
        out += ")";
        break;
      case ExprKind::WhileHelper:
        out += "F.whileHelper";
        args(e.kids, 0);
        break;
      case ExprKind::ShiftCall:
        out += "F.shift[" + escape(e.name2) + "](";
        expr(e.kid(0), kPostfix);
        out += "." + e.name + ")";
        args(e.kids, 1);
        break;
      case ExprKind::ChainOp:
        out += "F.chain[" + e.name + "]";
        args(e.kids, 0);
        break;
      case ExprKind::FinishChain: core1("finishChain", e.kid(0)); break;
      case ExprKind::CpsBlock:
        out += "cps[" + e.name + "] { ";
        seq(e.kid(0));
        out += " }";
        break;
    }
  }

  void core1(const char* op, const ExprPtr& k) {
    out += "F.";
    out += op;
    out += "(";
    expr(k, kLow);
    out += ")";
  }
};

}  // namespace

std::string pretty_literal(const Literal& l) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UnitLit>)
          return "unit";
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(v);
        else
          return escape(v);
      },
      l);
}

std::string pretty_pattern(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Wild: return "_";
    case Pattern::Kind::Bind: return p.name;
    case Pattern::Kind::Lit: return pretty_literal(p.lit);
  }
  return "_";
}

std::string pretty(const ExprPtr& e) {
  Printer p;
  p.seq(e);
  return p.out;
}

std::string pretty(const Program& prog) {
  Printer p;
  for (const auto& d : prog.defs) {
    p.out += "def " + d.name;
    p.params(d.params);
    p.out += ": " + show_ty(d.ret) + " = ";
    p.braced(d.body);
    p.out += "\n";
  }
  p.seq(prog.main);
  p.out += "\n";
  return p.out;
}

}  // namespace cpsforge
