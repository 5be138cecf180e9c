#include "cpsforge/typer.hpp"

#include <functional>
#include <map>
#include <optional>

#include "cpsforge/monads.hpp"

namespace cpsforge {

namespace {

const std::set<std::string> kBuiltins = {
    "pure_ident", "pure_option", "pure_result", "pure_nondet", "pure_eventual", "pure_resource",
    "some",       "none_of",     "ok",          "err_of",      "choose",        "delay",
    "fail_eventual", "never_of", "spawn",       "io",          "open",          "read",
    "write",      "mkfile",      "acquire",     "tick",        "counter",       "range",
    "cache",      "box",         "not",         "memoize",     "discard",       "list",
    "nil_of"};

struct Binding {
  TyPtr ty;
  bool mutable_ = false;
};

class Scope {
 public:
  void push() { frames_.emplace_back(); }
  void pop() { frames_.pop_back(); }
  void bind(const std::string& n, TyPtr t, bool m = false) { frames_.back()[n] = Binding{std::move(t), m}; }
  const Binding* find(const std::string& n) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

 private:
  std::vector<std::map<std::string, Binding>> frames_;
};

struct ScopeGuard {
  Scope& s;
  explicit ScopeGuard(Scope& sc) : s(sc) { s.push(); }
  ~ScopeGuard() { s.pop(); }
};

bool is_nothing(const TyPtr& t) { return t && t->kind == TyKind::Nothing; }

std::string sh(const TyPtr& t) { return show_ty(t); }

class Typer {
 public:
  explicit Typer(TypeOptions o) : opts_(o) {}

  TypedProgram run(const Program& p) {
    TypedProgram out;
    for (const auto& d : p.defs) {
      if (defs_.count(d.name) || kBuiltins.count(d.name))
        throw TypeError(d.span, "duplicate definition of '" + d.name + "'");
      std::vector<TyPtr> ps;
      for (const auto& prm : d.params) ps.push_back(prm.ty);
      defs_[d.name] = Ty::fun(ps, d.ret);
    }
    for (const auto& d : p.defs) {
      ScopeGuard g(scope_);
      for (const auto& prm : d.params) scope_.bind(prm.name, prm.ty);
      FunDef td = d;
      td.body = expr(d.body, false);
      if (!compatible(td.body->ty, d.ret))
        throw TypeError(d.body->span,
                        "body of '" + d.name + "' has type " + sh(td.body->ty) + ", declared " + sh(d.ret),
                        td.body->ty, d.ret);
      out.program.defs.push_back(std::move(td));
    }
    scope_.push();
    out.program.main = expr(p.main, false);
    scope_.pop();
    out.awaits = std::move(awaits_);
    out.implicit_awaits = std::move(implicit_);
    return out;
  }

 private:
  // -- helpers ---------------------------------------------------------------

  static bool compatible(const TyPtr& found, const TyPtr& want) { return is_nothing(found) || ty_eq(found, want); }

  static TyPtr join(const TyPtr& a, const TyPtr& b) { return is_nothing(a) ? b : a; }

  /// Check that `e` (already typed) can be used where `want` is expected.
  /// In lenient mode an `F[want]` in the current async is accepted and
  /// recorded as an implicit await.
  void expect(const ExprPtr& e, const TyPtr& want, const std::string& what) {
    if (compatible(e->ty, want)) return;
    if (implicit_ok(e, want)) return;
    throw TypeError(e->span, what + ": expected " + sh(want) + ", found " + sh(e->ty), e->ty, want);
  }

  bool implicit_ok(const ExprPtr& e, const TyPtr& want) {
    if (!opts_.lenient || monad_.empty()) return false;
    if (e->ty && e->ty->is_monad(monad_) && ty_eq(e->ty->elem(), want)) {
      implicit_.insert(e->id);
      return true;
    }
    return false;
  }

  /// Element view of a value consumed directly (method receiver).
  TyPtr deref(const ExprPtr& e) {
    if (opts_.lenient && !monad_.empty() && e->ty && e->ty->is_monad(monad_)) {
      implicit_.insert(e->id);
      return e->ty->elem();
    }
    return e->ty;
  }

  static ExprPtr typed(const ExprPtr& src, std::vector<ExprPtr> kids, TyPtr t) {
    auto n = std::make_shared<Expr>(*src);
    n->kids = std::move(kids);
    n->ty = std::move(t);
    return n;
  }

  [[noreturn]] static void fail(Span s, const std::string& msg) { throw TypeError(s, msg); }

  // -- expressions -------------------------------------------------------------

  /// `arg_position`: `e` is a direct argument (or the callee) of an Apply or
  /// MethodCall, the only place a lambda may contain await.
  ExprPtr expr(const ExprPtr& e, bool arg_position) {
    switch (e->kind) {
      case ExprKind::Lit: {
        TyPtr t = std::visit(
            [](const auto& v) -> TyPtr {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, UnitLit>)
                return Ty::unit();
              else if constexpr (std::is_same_v<T, bool>)
                return Ty::bool_();
              else if constexpr (std::is_same_v<T, std::int64_t>)
                return Ty::int_();
              else
                return Ty::str();
            },
            e->lit);
        return with_ty(e, t);
      }
      case ExprKind::Var: {
        if (auto* b = scope_.find(e->name)) return with_ty(e, b->ty);
        auto d = defs_.find(e->name);
        if (d != defs_.end()) return with_ty(e, d->second);
        fail(e->span, "unknown identifier '" + e->name + "'");
      }
      case ExprKind::Block: {
        if (e->kids.empty()) fail(e->span, "empty block");
        std::vector<ExprPtr> ks;
        ScopeGuard g(scope_);
        for (const auto& k : e->kids) ks.push_back(expr(k, false));
        TyPtr t = ks.back()->ty;
        return typed(e, std::move(ks), t);
      }
      case ExprKind::ValDef:
      case ExprKind::VarDef: {
        auto rhs = expr(e->kid(0), false);
        if (rhs->ty->kind == TyKind::Unit && e->kind == ExprKind::VarDef) {
          // allowed, if odd
        }
        ScopeGuard g(scope_);
        scope_.bind(e->name, rhs->ty, e->kind == ExprKind::VarDef);
        auto body = expr(e->kid(1), false);
        TyPtr t = body->ty;
        return typed(e, {rhs, body}, t);
      }
      case ExprKind::Assign: {
        const Binding* b = scope_.find(e->name);
        if (!b) fail(e->span, "unknown identifier '" + e->name + "'");
        if (!b->mutable_) fail(e->span, "cannot assign to val '" + e->name + "'");
        TyPtr vt = b->ty;
        auto rhs = expr(e->kid(0), false);
        expect(rhs, vt, "assignment to '" + e->name + "'");
        return typed(e, {rhs}, Ty::unit());
      }
      case ExprKind::If: {
        auto c = expr(e->kid(0), false);
        expect(c, Ty::bool_(), "condition");
        auto a = expr(e->kid(1), false);
        auto b = expr(e->kid(2), false);
        if (!compatible(a->ty, b->ty) && !compatible(b->ty, a->ty))
          throw TypeError(e->kid(2)->span, "branch type mismatch: " + sh(a->ty) + " vs " + sh(b->ty), b->ty, a->ty);
        TyPtr t = join(a->ty, b->ty);
        return typed(e, {c, a, b}, t);
      }
      case ExprKind::While: {
        auto c = expr(e->kid(0), false);
        expect(c, Ty::bool_(), "while condition");
        auto b = expr(e->kid(1), false);
        return typed(e, {c, b}, Ty::unit());
      }
      case ExprKind::Match: {
        auto s = expr(e->kid(0), false);
        TyPtr st = s->ty;
        if (e->pats.empty()) fail(e->span, "match without cases");
        auto last = e->pats.back().kind;
        if (last != Pattern::Kind::Wild && last != Pattern::Kind::Bind)
          fail(e->span, "match must end with a catch-all case");
        std::vector<ExprPtr> ks{s};
        TyPtr t;
        for (std::size_t i = 0; i < e->pats.size(); ++i) {
          const Pattern& p = e->pats[i];
          ScopeGuard g(scope_);
          if (p.kind == Pattern::Kind::Lit) {
            auto lt = expr(mk::lit(p.lit, e->span), false)->ty;
            if (!ty_eq(lt, st)) throw TypeError(e->kid(i + 1)->span, "pattern type " + sh(lt) + " does not match scrutinee " + sh(st), lt, st);
          } else if (p.kind == Pattern::Kind::Bind) {
            scope_.bind(p.name, st);
          }
          auto body = expr(e->kid(i + 1), false);
          if (t && !compatible(body->ty, t) && !compatible(t, body->ty))
            throw TypeError(body->span, "case type mismatch: " + sh(body->ty) + " vs " + sh(t), body->ty, t);
          t = t ? join(t, body->ty) : body->ty;
          ks.push_back(body);
        }
        return typed(e, std::move(ks), t);
      }
      case ExprKind::Try: {
        if (!monad_.empty() && !has_error_channel(monad_))
          fail(e->span, "try is not supported in async[" + monad_ + "]: no error channel");
        auto body = expr(e->kid(0), false);
        ExprPtr h, f;
        TyPtr t = body->ty;
        if (e->kid(1)) {
          ScopeGuard g(scope_);
          scope_.bind(e->name, Ty::str());
          h = expr(e->kid(1), false);
          if (!compatible(h->ty, t) && !compatible(t, h->ty))
            throw TypeError(h->span, "catch type mismatch: " + sh(h->ty) + " vs " + sh(t), h->ty, t);
          t = join(t, h->ty);
        }
        if (e->kid(2)) f = expr(e->kid(2), false);
        return typed(e, {body, h, f}, t);
      }
      case ExprKind::Throw: {
        if (!monad_.empty() && !has_error_channel(monad_))
          fail(e->span, "throw is not supported in async[" + monad_ + "]: no error channel");
        auto m = expr(e->kid(0), false);
        expect(m, Ty::str(), "throw message");
        return typed(e, {m}, Ty::nothing());
      }
      case ExprKind::Lambda: {
        if (e->params.empty()) fail(e->span, "lambda needs at least one parameter");
        ScopeGuard g(scope_);
        std::vector<TyPtr> ps;
        for (const auto& p : e->params) {
          if (!p.ty) fail(e->span, "lambda parameter '" + p.name + "' needs a type");
          scope_.bind(p.name, p.ty);
          ps.push_back(p.ty);
        }
        auto body = expr(e->kid(0), false);
        if (!arg_position && !monad_.empty() && has_await(body))
          fail(first_await(body)->span, "await in unsupported position: lambda must be a direct call argument");
        return typed(e, {body}, Ty::fun(ps, body->ty));
      }
      case ExprKind::Apply: return apply(e);
      case ExprKind::MethodCall: return method(e);
      case ExprKind::Await: {
        if (monad_.empty()) fail(e->span, "await outside async");
        auto inner = expr(e->kid(0), false);
        if (!inner->ty || inner->ty->kind != TyKind::Monad)
          throw TypeError(inner->span, "await of non-monadic value of type " + sh(inner->ty), inner->ty);
        const std::string& g = inner->ty->name;
        bool conv = g != monad_;
        if (conv && !conversion_registered(g, monad_))
          fail(e->span, "no conversion from " + g + " to " + monad_);
        awaits_.push_back(AwaitInfo{e->id, g, monad_, conv});
        return typed(e, {inner}, inner->ty->elem());
      }
      case ExprKind::Async: {
        if (!is_monad_name(e->name)) fail(e->span, "unknown monad '" + e->name + "'");
        std::string saved = monad_;
        monad_ = e->name;
        ExprPtr body;
        try {
          body = expr(e->kid(0), false);
        } catch (...) {
          monad_ = saved;
          throw;
        }
        monad_ = saved;
        return typed(e, {body}, Ty::monad(e->name, body->ty));
      }
      default: fail(e->span, "monadic core form '" + std::string(kind_name(e->kind)) + "' in source program");
    }
  }

  static ExprPtr first_await(const ExprPtr& e) {
    if (!e) return nullptr;
    if (e->kind == ExprKind::Await) return e;
    if (e->kind == ExprKind::Async) return nullptr;
    for (const auto& k : e->kids)
      if (auto a = first_await(k)) return a;
    return nullptr;
  }

  std::vector<ExprPtr> args_of(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    for (std::size_t i = 1; i < e->kids.size(); ++i) out.push_back(expr(e->kid(i), true));
    return out;
  }

  void arity(const ExprPtr& e, std::size_t n, const std::string& what) {
    if (e->kids.size() - 1 != n)
      fail(e->span, what + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") + ", got " +
                        std::to_string(e->kids.size() - 1));
  }

  ExprPtr apply(const ExprPtr& e) {
    const auto& fn = e->kid(0);
    if (fn->kind == ExprKind::Var && !scope_.find(fn->name) && !defs_.count(fn->name) && kBuiltins.count(fn->name))
      return builtin(e);
    auto f = expr(fn, true);
    auto args = args_of(e);
    TyPtr ft = deref(f);
    if (!ft || ft->kind != TyKind::Fun) fail(fn->span, "cannot call a value of type " + sh(f->ty));
    if (args.size() != ft->arity())
      fail(e->span, "function expects " + std::to_string(ft->arity()) + " arguments, got " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) expect(args[i], ft->args[i], "argument " + std::to_string(i + 1));
    std::vector<ExprPtr> ks{f};
    ks.insert(ks.end(), args.begin(), args.end());
    return typed(e, std::move(ks), ft->ret());
  }

  ExprPtr builtin(const ExprPtr& e) {
    const std::string& n = e->kid(0)->name;
    auto args = args_of(e);
    auto fn_node = with_ty(e->kid(0), Ty::unit());
    auto done = [&](TyPtr t) {
      std::vector<ExprPtr> ks{fn_node};
      ks.insert(ks.end(), args.begin(), args.end());
      return typed(e, std::move(ks), std::move(t));
    };
    auto need = [&](std::size_t k) { arity(e, k, "'" + n + "'"); };
    if (n.rfind("pure_", 0) == 0) {
      need(1);
      return done(Ty::monad(n.substr(5), args[0]->ty));
    }
    if (n == "some") {
      need(1);
      return done(Ty::monad("option", args[0]->ty));
    }
    if (n == "none_of") {
      need(1);
      return done(Ty::monad("option", args[0]->ty));
    }
    if (n == "ok") {
      need(1);
      return done(Ty::monad("result", args[0]->ty));
    }
    if (n == "err_of" || n == "fail_eventual") {
      need(2);
      expect(args[1], Ty::str(), "error message");
      return done(Ty::monad(n == "err_of" ? "result" : "eventual", args[0]->ty));
    }
    if (n == "choose") {
      need(1);
      TyPtr lt = deref_arg(args[0]);
      if (lt->kind != TyKind::List) fail(args[0]->span, "choose expects a list, found " + sh(args[0]->ty));
      return done(Ty::monad("nondet", lt->elem()));
    }
    if (n == "delay" || n == "never_of") {
      need(1);
      return done(Ty::monad("eventual", args[0]->ty));
    }
    if (n == "spawn" || n == "io") {
      need(2);
      expect(args[0], Ty::str(), "effect site");
      return done(Ty::monad(n == "spawn" ? "eventual" : "resource", args[1]->ty));
    }
    if (n == "acquire") {
      need(2);
      expect(args[0], Ty::str(), "resource name");
      return done(Ty::monad("resource", args[1]->ty));
    }
    if (n == "open") {
      need(1);
      expect(args[0], Ty::str(), "file name");
      return done(Ty::monad("resource", Ty::receiver("File")));
    }
    if (n == "read") {
      need(2);
      expect(args[0], Ty::receiver("File"), "read source");
      expect(args[1], Ty::int_(), "read size");
      return done(Ty::monad("resource", Ty::receiver("Buffer")));
    }
    if (n == "write") {
      need(2);
      expect(args[0], Ty::receiver("File"), "write target");
      expect(args[1], Ty::receiver("Buffer"), "write buffer");
      return done(Ty::monad("resource", Ty::unit()));
    }
    if (n == "mkfile") {
      need(2);
      expect(args[0], Ty::str(), "file name");
      expect(args[1], Ty::int_(), "file size");
      return done(Ty::unit());
    }
    if (n == "tick") {
      need(1);
      expect(args[0], Ty::str(), "effect site");
      return done(Ty::unit());
    }
    if (n == "counter") {
      need(1);
      expect(args[0], Ty::str(), "effect site");
      return done(Ty::int_());
    }
    if (n == "range") {
      need(2);
      expect(args[0], Ty::int_(), "range start");
      expect(args[1], Ty::int_(), "range end");
      return done(Ty::receiver("Range"));
    }
    if (n == "cache") {
      need(0);
      return done(Ty::receiver("Cache"));
    }
    if (n == "box") {
      need(1);
      return done(Ty::receiver("Box", {args[0]->ty}));
    }
    if (n == "not") {
      need(1);
      expect(args[0], Ty::bool_(), "'not' argument");
      return done(Ty::bool_());
    }
    if (n == "memoize") {
      need(1);
      if (args[0]->ty->kind != TyKind::Monad) fail(args[0]->span, "memoize expects a monadic value");
      return done(Ty::monad(args[0]->ty->name, args[0]->ty));
    }
    if (n == "discard") {
      need(1);
      return done(Ty::unit());
    }
    if (n == "nil_of") {
      need(1);
      return done(Ty::list(args[0]->ty));
    }
    // list literal
    if (args.empty()) fail(e->span, "empty list literal needs nil_of(witness)");
    TyPtr el = args[0]->ty;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (is_nothing(el)) el = args[i]->ty;
      expect(args[i], el, "list element");
    }
    return done(Ty::list(el));
  }

  TyPtr deref_arg(const ExprPtr& a) {
    if (opts_.lenient && !monad_.empty() && a->ty->is_monad(monad_) && a->ty->elem()->kind == TyKind::List) {
      implicit_.insert(a->id);
      return a->ty->elem();
    }
    return a->ty;
  }

  // -- methods -----------------------------------------------------------------

  /// Function-typed argument: returns the result type after checking the
  /// parameter types.
  TyPtr fn_arg(const ExprPtr& a, const std::vector<TyPtr>& params, const std::string& what) {
    TyPtr t = a->ty;
    if (!t || t->kind != TyKind::Fun) fail(a->span, what + " expects a function, found " + sh(t));
    if (t->arity() != params.size())
      fail(a->span, what + " expects a function of " + std::to_string(params.size()) + " parameter(s)");
    for (std::size_t i = 0; i < params.size(); ++i)
      if (!ty_eq(t->args[i], params[i]))
        throw TypeError(a->span, what + ": parameter " + std::to_string(i + 1) + " should be " + sh(params[i]) +
                                     ", found " + sh(t->args[i]),
                        t->args[i], params[i]);
    return t->ret();
  }

  ExprPtr method(const ExprPtr& e) {
    auto recv = expr(e->kid(0), false);
    auto args = args_of(e);
    const std::string& m = e->name;
    TyPtr rt = deref(recv);
    auto done = [&](TyPtr t) {
      std::vector<ExprPtr> ks{recv};
      ks.insert(ks.end(), args.begin(), args.end());
      return typed(e, std::move(ks), std::move(t));
    };
    auto need = [&](std::size_t k) { arity(e, k, "method '" + m + "'"); };
    auto unknown = [&]() -> ExprPtr { fail(e->span, "unknown method '" + m + "' on " + sh(recv->ty)); };

    if (m == "eq" || m == "ne") {
      need(1);
      if (rt->kind == TyKind::Fun || rt->kind == TyKind::Monad) fail(e->span, "values of type " + sh(rt) + " are not comparable");
      expect(args[0], rt, "comparison operand");
      return done(Ty::bool_());
    }
    switch (rt->kind) {
      case TyKind::Int:
        if (m == "plus" || m == "minus" || m == "times" || m == "div" || m == "mod") {
          need(1);
          expect(args[0], Ty::int_(), "operand of '" + std::string(binary_op_for(m)) + "'");
          return done(Ty::int_());
        }
        if (m == "lt" || m == "le" || m == "gt" || m == "ge") {
          need(1);
          expect(args[0], Ty::int_(), "operand of '" + std::string(binary_op_for(m)) + "'");
          return done(Ty::bool_());
        }
        if (m == "abs" || m == "negate") {
          need(0);
          return done(Ty::int_());
        }
        if (m == "show") {
          need(0);
          return done(Ty::str());
        }
        return unknown();
      case TyKind::Bool:
        if (m == "and" || m == "or") {
          need(1);
          expect(args[0], Ty::bool_(), "operand of '" + std::string(binary_op_for(m)) + "'");
          return done(Ty::bool_());
        }
        if (m == "show") {
          need(0);
          return done(Ty::str());
        }
        return unknown();
      case TyKind::Str:
        if (m == "plus") {
          need(1);
          expect(args[0], Ty::str(), "operand of '+'");
          return done(Ty::str());
        }
        if (m == "size") {
          need(0);
          return done(Ty::int_());
        }
        return unknown();
      case TyKind::List: {
        TyPtr el = rt->elem();
        if (m == "size") {
          need(0);
          return done(Ty::int_());
        }
        if (m == "isEmpty") {
          need(0);
          return done(Ty::bool_());
        }
        if (m == "get") {
          need(1);
          expect(args[0], Ty::int_(), "index");
          return done(el);
        }
        if (m == "appended") {
          need(1);
          expect(args[0], el, "appended element");
          return done(rt);
        }
        if (m == "concat") {
          need(1);
          expect(args[0], rt, "concatenated list");
          return done(rt);
        }
        if (m == "contains") {
          need(1);
          expect(args[0], el, "element");
          return done(Ty::bool_());
        }
        if (m == "map") {
          need(1);
          return done(Ty::list(fn_arg(args[0], {el}, "map")));
        }
        if (m == "filter" || m == "exists" || m == "withFilter") {
          need(1);
          TyPtr r = fn_arg(args[0], {el}, m);
          if (!compatible(r, Ty::bool_())) fail(args[0]->span, m + " expects a predicate, found result " + sh(r));
          if (m == "filter") return done(rt);
          if (m == "exists") return done(Ty::bool_());
          return done(Ty::receiver("WithFilter", {el}));
        }
        if (m == "foreach") {
          need(1);
          fn_arg(args[0], {el}, "foreach");
          return done(Ty::unit());
        }
        if (m == "fold") {
          need(2);
          TyPtr acc = args[0]->ty;
          TyPtr r = fn_arg(args[1], {acc, el}, "fold");
          if (!compatible(r, acc)) fail(args[1]->span, "fold function returns " + sh(r) + ", accumulator is " + sh(acc));
          return done(acc);
        }
        if (m == "getOrElse") {
          need(2);
          expect(args[0], Ty::int_(), "index");
          expect(args[1], el, "default");
          return done(el);
        }
        return unknown();
      }
      case TyKind::Option: {
        TyPtr el = rt->elem();
        if (m == "isDefined") {
          need(0);
          return done(Ty::bool_());
        }
        if (m == "get") {
          need(0);
          return done(el);
        }
        if (m == "getOrElse") {
          need(1);
          expect(args[0], el, "default");
          return done(el);
        }
        return unknown();
      }
      case TyKind::Receiver: return receiver_method(e, rt, args, done, need, unknown);
      default: return unknown();
    }
  }

  template <class Done, class Need, class Unknown>
  ExprPtr receiver_method(const ExprPtr& e, const TyPtr& rt, std::vector<ExprPtr>& args, Done done, Need need,
                          Unknown unknown) {
    const std::string& m = e->name;
    const std::string& r = rt->name;
    if (r == "WithFilter") {
      TyPtr el = rt->elem();
      if (m == "map") {
        need(1);
        return done(Ty::list(fn_arg(args[0], {el}, "map")));
      }
      if (m == "foreach") {
        need(1);
        fn_arg(args[0], {el}, "foreach");
        return done(Ty::unit());
      }
      if (m == "filter" || m == "withFilter") {
        need(1);
        TyPtr res = fn_arg(args[0], {el}, m);
        if (!compatible(res, Ty::bool_())) fail(args[0]->span, m + " expects a predicate");
        return done(rt);
      }
      return unknown();
    }
    if (r == "Range") {
      if (m == "foreach") {
        need(1);
        fn_arg(args[0], {Ty::int_()}, "foreach");
        return done(Ty::unit());
      }
      if (m == "filter" || m == "exists") {
        need(1);
        TyPtr res = fn_arg(args[0], {Ty::int_()}, m);
        if (!compatible(res, Ty::bool_())) fail(args[0]->span, m + " expects a predicate");
        return done(m == "filter" ? Ty::list(Ty::int_()) : Ty::bool_());
      }
      if (m == "map") {
        need(1);
        return done(Ty::list(fn_arg(args[0], {Ty::int_()}, "map")));
      }
      if (m == "toList") {
        need(0);
        return done(Ty::list(Ty::int_()));
      }
      if (m == "size") {
        need(0);
        return done(Ty::int_());
      }
      return unknown();
    }
    if (r == "Cache") {
      if (m == "get") {
        need(1);
        expect(args[0], Ty::int_(), "key");
        return done(Ty::option(Ty::int_()));
      }
      if (m == "put") {
        need(2);
        expect(args[0], Ty::int_(), "key");
        expect(args[1], Ty::int_(), "value");
        return done(Ty::unit());
      }
      if (m == "getOrUpdate" || m == "getOrElse") {
        need(2);
        expect(args[0], Ty::int_(), "key");
        expect(args[1], Ty::int_(), "value");
        return done(Ty::int_());
      }
      if (m == "size") {
        need(0);
        return done(Ty::int_());
      }
      return unknown();
    }
    if (r == "Box") {
      TyPtr el = rt->elem();
      if (m == "get") {
        need(0);
        return done(el);
      }
      if (m == "map") {
        need(1);
        return done(Ty::receiver("Box", {fn_arg(args[0], {el}, "map")}));
      }
      if (m == "apply") {
        need(1);
        return done(fn_arg(args[0], {el}, "apply"));
      }
      return unknown();
    }
    if (r == "Buffer") {
      if (m == "position") {
        need(0);
        return done(Ty::int_());
      }
      return unknown();
    }
    if (r == "File") {
      if (m == "size") {
        need(0);
        return done(Ty::int_());
      }
      return unknown();
    }
    return unknown();
  }

  TypeOptions opts_;
  Scope scope_;
  std::map<std::string, TyPtr> defs_;
  std::string monad_;
  std::vector<AwaitInfo> awaits_;
  std::set<int> implicit_;
};

}  // namespace

TypedProgram typecheck(const Program& p, const TypeOptions& opts) { return Typer(opts).run(p); }

bool has_await(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Await) return true;
  if (e->kind == ExprKind::Async || e->kind == ExprKind::CpsBlock) return false;
  for (const auto& k : e->kids)
    if (has_await(k)) return true;
  return false;
}

bool has_error_channel(std::string_view m) { return m == "result" || m == "eventual" || m == "resource"; }

std::vector<std::size_t> by_name_params(const TyPtr& recv, std::string_view method) {
  if (!recv) return {};
  if (recv->kind == TyKind::Receiver && recv->name == "Cache" && (method == "getOrUpdate" || method == "getOrElse"))
    return {1};
  if (recv->kind == TyKind::List && method == "getOrElse") return {1};
  if (recv->kind == TyKind::Option && method == "getOrElse") return {0};
  return {};
}

bool is_builtin_function(std::string_view name) { return kBuiltins.count(std::string(name)) > 0; }

}  // namespace cpsforge
