#include "cpsforge/cps.hpp"

#include <algorithm>
#include <functional>

namespace cpsforge {

namespace {

bool has_throw(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Throw) return true;
  if (e->kind == ExprKind::Lambda || e->kind == ExprKind::Async || e->kind == ExprKind::CpsBlock) return false;
  for (const auto& k : e->kids)
    if (has_throw(k)) return true;
  return false;
}

void collect_names(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (!e->name.empty()) out.insert(e->name);
  if (!e->name2.empty()) out.insert(e->name2);
  for (const auto& p : e->params) out.insert(p.name);
  for (const auto& p : e->pats)
    if (p.kind == Pattern::Kind::Bind) out.insert(p.name);
  for (const auto& k : e->kids) collect_names(k, out);
}

void collect_assigned(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->is(ExprKind::Assign)) out.insert(e->name);
  for (const auto& k : e->kids) collect_assigned(k, out);
}

std::string rule_for(ExprKind k) {
  switch (k) {
    case ExprKind::Lit:
    case ExprKind::Var: return "trivial";
    case ExprKind::Block: return "sequential";
    case ExprKind::ValDef:
    case ExprKind::VarDef: return "val";
    case ExprKind::Assign: return "assign";
    case ExprKind::If: return "condition";
    case ExprKind::Match: return "match";
    case ExprKind::While: return "while";
    case ExprKind::Try: return "try";
    case ExprKind::Throw: return "throw";
    case ExprKind::Lambda: return "lambda";
    case ExprKind::Apply:
    case ExprKind::MethodCall: return "application";
    case ExprKind::Await: return "await";
    case ExprKind::Async: return "async";
    default: return "core";
  }
}

/// Translation of one subterm: a residual pure expression, a monadic
/// expression of type F[T], or a call-chain builder expression.
struct T {
  enum Kind { Pure, Monadic, Chain } kind = Pure;
  ExprPtr e;
  bool pure() const { return kind == Pure; }
};

T pure_t(ExprPtr e) { return {T::Pure, std::move(e)}; }
T mon_t(ExprPtr e) { return {T::Monadic, std::move(e)}; }

ExprPtr seq(const ExprPtr& a, const ExprPtr& b) {
  std::vector<ExprPtr> stmts;
  auto push = [&](const ExprPtr& x) {
    if (x->is(ExprKind::Block))
      for (const auto& s : x->kids) stmts.push_back(s);
    else
      stmts.push_back(x);
  };
  push(a);
  push(b);
  return mk::block(std::move(stmts));
}

class Transformer {
 public:
  Transformer(const TransformOptions& o, const ShiftRegistry& reg, std::set<std::string> taken,
              std::set<std::string> assigned)
      : opt_(o.optimize), trace_on_(o.trace), reg_(reg), taken_(std::move(taken)), assigned_(std::move(assigned)) {}

  std::vector<RuleApp> trace;

  /// Translate an async body under monad `f`; returns the body as F[T].
  T body(const std::string& f, const ExprPtr& e) {
    std::string saved = f_;
    f_ = f;
    T r = tr(e);
    f_ = saved;
    return r;
  }

  ExprPtr to_m(const T& t) {
    switch (t.kind) {
      case T::Pure: return mk::pure(t.e);
      case T::Chain: return mk::finish_chain(t.e);
      case T::Monadic: return t.e;
    }
    return t.e;
  }

  /// Pure code: only nested async blocks change.
  ExprPtr residual(const ExprPtr& e) {
    if (!e) return e;
    if (e->is(ExprKind::Async)) return async_block(e);
    bool changed = false;
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    for (const auto& k : e->kids) {
      kids.push_back(residual(k));
      if (kids.back() != k) changed = true;
    }
    return changed ? with_kids(e, std::move(kids)) : e;
  }

 private:
  bool opt_;
  bool trace_on_;
  const ShiftRegistry& reg_;
  std::set<std::string> taken_;
  std::set<std::string> assigned_;
  std::string f_;
  int counter_ = 0;

  std::string fresh() {
    while (true) {
      std::string n = "_t" + std::to_string(++counter_);
      if (!taken_.contains(n)) {
        taken_.insert(n);
        return n;
      }
    }
  }

  void note(const ExprPtr& e, std::string rule) {
    if (trace_on_) trace.push_back({e->id, e->span, std::move(rule)});
  }

  bool P(const T& t) const { return opt_ && t.pure(); }

  ExprPtr async_block(const ExprPtr& e) {
    note(e, "async");
    T b = body(e->name, e->kid(0));
    return mk::cps_block(e->name, to_m(b));
  }

  bool effectful(const ExprPtr& e) const { return has_await(e) || has_throw(e); }

  ExprPtr bind_into(const ExprPtr& m, const std::string& x, const ExprPtr& body) {
    if (!opt_) return mk::flat_map(m, x, body);
    switch (m->kind) {
      case ExprKind::Pure: {
        const auto& r = m->kid(0);
        if (x == "_") {
          if (r->is(ExprKind::Lit) || r->is(ExprKind::Var)) return body;
          return seq(r, body);
        }
        return mk::val(x, r, body);
      }
      case ExprKind::FlatMap:
      case ExprKind::ValDef:
      case ExprKind::VarDef: {
        std::string y = m->name;
        ExprPtr k = m->kid(1);
        if (y != x && y != "_" && free_vars(body).contains(y)) {
          std::string y2 = fresh();
          k = rename_free(k, y, y2);
          y = y2;
        }
        auto copy = std::make_shared<Expr>(*m);
        copy->name = y;
        copy->kids[1] = bind_into(k, x, body);
        return copy;
      }
      case ExprKind::Block: {
        std::vector<ExprPtr> kids = m->kids;
        kids.back() = bind_into(kids.back(), x, body);
        return mk::block(std::move(kids));
      }
      default: return mk::flat_map(m, x, body);
    }
  }

  ExprPtr bind_t(const T& t, const std::string& x, const ExprPtr& body) { return bind_into(to_m(t), x, body); }

  T tr(const ExprPtr& e) {
    if (e->is(ExprKind::Block) && e->kids.size() == 1) return tr(e->kid(0));
    if (opt_ && !effectful(e)) {
      note(e, rule_for(e->kind));
      return pure_t(residual(e));
    }
    switch (e->kind) {
      case ExprKind::Lit:
      case ExprKind::Var: note(e, "trivial"); return pure_t(e);
      case ExprKind::Lambda: note(e, "lambda"); return pure_t(residual(e));
      case ExprKind::Async: return pure_t(async_block(e));
      case ExprKind::Block: return block(e);
      case ExprKind::ValDef:
      case ExprKind::VarDef: return val(e);
      case ExprKind::Assign: {
        note(e, "assign");
        T b = tr(e->kid(0));
        if (P(b)) return pure_t(mk::assign(e->name, b.e));
        std::string t = fresh();
        return mon_t(bind_t(b, t, mk::pure(mk::assign(e->name, mk::var(t)))));
      }
      case ExprKind::If: return cond(e);
      case ExprKind::Match: return match(e);
      case ExprKind::While: {
        note(e, "while");
        T c = tr(e->kid(0));
        T b = tr(e->kid(1));
        if (P(c) && P(b)) return pure_t(mk::while_(c.e, b.e));
        return mon_t(mk::while_helper(to_m(c), to_m(b)));
      }
      case ExprKind::Try: return try_(e);
      case ExprKind::Throw: {
        note(e, "throw");
        T m = tr(e->kid(0));
        if (P(m)) return mon_t(mk::error(m.e));
        std::string t = fresh();
        return mon_t(bind_t(m, t, mk::error(mk::var(t))));
      }
      case ExprKind::Apply:
      case ExprKind::MethodCall: return call(e);
      case ExprKind::Await: {
        note(e, "await");
        T in = tr(e->kid(0));
        const std::string& g = e->kid(0)->ty->name;
        auto adopt = [&](ExprPtr x) {
          if (g != f_) x = mk::convert(g, f_, std::move(x));
          return mk::adopt(std::move(x), e->id);
        };
        if (P(in)) return mon_t(adopt(in.e));
        std::string t = fresh();
        return mon_t(bind_t(in, t, adopt(mk::var(t))));
      }
      default:
        throw Error(ErrorKind::UnsupportedPosition, e->span,
                    "unexpected " + std::string(kind_name(e->kind)) + " node in async body");
    }
  }

  T block(const ExprPtr& e) {
    note(e, "sequential");
    std::vector<T> ts;
    for (const auto& s : e->kids) ts.push_back(tr(s));
    T acc = ts.back();
    for (std::size_t i = ts.size() - 1; i-- > 0;) {
      const T& s = ts[i];
      if (P(s) && P(acc))
        acc = pure_t(seq(s.e, acc.e));
      else if (P(s))
        acc = mon_t(seq(s.e, to_m(acc)));
      else
        acc = mon_t(bind_t(s, "_", to_m(acc)));
    }
    return acc;
  }

  T val(const ExprPtr& e) {
    note(e, "val");
    T b = tr(e->kid(0));
    T c = tr(e->kid(1));
    bool is_var = e->is(ExprKind::VarDef);
    auto def = [&](ExprPtr rhs, ExprPtr body) {
      return is_var ? mk::var_def(e->name, std::move(rhs), std::move(body)) : mk::val(e->name, std::move(rhs), std::move(body));
    };
    if (P(b) && P(c)) return pure_t(def(b.e, c.e));
    if (P(b)) return mon_t(def(b.e, to_m(c)));
    if (!is_var) return mon_t(bind_t(b, e->name, to_m(c)));
    std::string t = fresh();
    return mon_t(bind_t(b, t, def(mk::var(t), to_m(c))));
  }

  T cond(const ExprPtr& e) {
    note(e, "condition");
    T a = tr(e->kid(0));
    T b = tr(e->kid(1));
    T c = tr(e->kid(2));
    if (P(a) && P(b) && P(c)) return pure_t(mk::if_(a.e, b.e, c.e));
    if (P(a)) return mon_t(mk::if_(a.e, to_m(b), to_m(c)));
    std::string v = fresh();
    return mon_t(bind_t(a, v, mk::if_(mk::var(v), to_m(b), to_m(c))));
  }

  T match(const ExprPtr& e) {
    note(e, "match");
    T s = tr(e->kid(0));
    std::vector<T> bodies;
    bool all = P(s);
    for (std::size_t i = 1; i < e->kids.size(); ++i) {
      bodies.push_back(tr(e->kid(i)));
      all = all && P(bodies.back());
    }
    auto build = [&](ExprPtr scrut, bool monadic) {
      std::vector<std::pair<Pattern, ExprPtr>> cases;
      for (std::size_t i = 0; i < bodies.size(); ++i)
        cases.push_back({e->pats[i], monadic ? to_m(bodies[i]) : bodies[i].e});
      return mk::match(std::move(scrut), std::move(cases));
    };
    if (all) return pure_t(build(s.e, false));
    if (P(s)) return mon_t(build(s.e, true));
    std::string v = fresh();
    return mon_t(bind_t(s, v, build(mk::var(v), true)));
  }

  T try_(const ExprPtr& e) {
    note(e, "try");
    T b = tr(e->kid(0));
    bool has_h = e->kids.size() > 1 && e->kid(1);
    bool has_f = e->kids.size() > 2 && e->kid(2);
    T h = has_h ? tr(e->kid(1)) : T{};
    T f = has_f ? tr(e->kid(2)) : T{};
    if (P(b) && (!has_h || P(h)) && (!has_f || P(f)))
      return pure_t(mk::try_(b.e, e->name, has_h ? h.e : nullptr, has_f ? f.e : nullptr));
    std::string s = fresh();
    std::string err = has_h ? e->name : fresh();
    ExprPtr on_fail = has_h ? to_m(h) : mk::error(mk::var(err));
    ExprPtr inner = mk::flat_map_try(to_m(b), s, mk::pure(mk::var(s)), err, on_fail);
    if (!has_f) return mon_t(inner);
    std::string x = fresh();
    return mon_t(mk::flat_map(inner, x, mk::map(to_m(f), "_", mk::var(x))));
  }

  // --- calls ---------------------------------------------------------------

  struct Operand {
    T t;
    bool inline_only = false;  // by-name and lambda arguments are never let-bound
  };

  bool stable(const ExprPtr& e) const {
    return e->is(ExprKind::Lit) || e->is(ExprKind::Lambda) || (e->is(ExprKind::Var) && !assigned_.contains(e->name));
  }

  /// Bind effectful operands left to right, let-binding earlier pure ones
  /// whose value could change, then build `make(residual operands)`.
  T sequence(std::vector<Operand> ops, const std::function<T(std::vector<ExprPtr>)>& make) {
    int last_eff = -1;
    for (std::size_t i = 0; i < ops.size(); ++i)
      if (!ops[i].inline_only && !P(ops[i].t)) last_eff = static_cast<int>(i);
    struct Step {
      bool bind;
      std::string name;
      T t;
    };
    std::vector<Step> steps;
    std::vector<ExprPtr> res;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const T& t = ops[i].t;
      if (ops[i].inline_only) {
        res.push_back(t.e);
      } else if (!P(t)) {
        std::string n = fresh();
        steps.push_back({true, n, t});
        res.push_back(mk::var(n));
      } else if (static_cast<int>(i) < last_eff && !stable(t.e)) {
        std::string n = fresh();
        steps.push_back({false, n, t});
        res.push_back(mk::var(n));
      } else {
        res.push_back(t.e);
      }
    }
    T out = make(std::move(res));
    if (steps.empty()) return out;
    ExprPtr acc = to_m(out);
    for (std::size_t i = steps.size(); i-- > 0;) {
      const Step& s = steps[i];
      acc = s.bind ? bind_t(s.t, s.name, acc) : mk::val(s.name, s.t.e, acc);
    }
    return mon_t(acc);
  }

  /// `fun(params) => C[body]` for a lambda argument of a shifted call.
  ExprPtr shifted_lambda(const ExprPtr& lam) {
    note(lam, "lambda");
    T b = tr(lam->kid(0));
    auto out = std::make_shared<Expr>(*mk::lambda(lam->params, to_m(b), lam->span));
    return out;
  }

  /// Any function-like argument in shifted form.
  ExprPtr shifted_fn(const ExprPtr& arg, bool by_name) {
    if (by_name) {
      T b = tr(arg);
      return mk::lambda({}, to_m(b));
    }
    if (arg->is(ExprKind::Lambda)) return shifted_lambda(arg);
    // A function value: lift its result.
    ExprPtr fn = residual(arg);
    std::vector<Param> ps;
    std::vector<ExprPtr> as;
    const auto& ty = arg->ty;
    for (std::size_t i = 0; i < ty->arity(); ++i) {
      std::string n = fresh();
      ps.push_back({n, ty->args[i]});
      as.push_back(mk::var(n));
    }
    return mk::lambda(std::move(ps), mk::pure(mk::apply(fn, std::move(as))));
  }

  /// Monadic row: `x => F.flatMap(C[body])(y => y)`.
  ExprPtr monadic_fn(const ExprPtr& arg, bool by_name) {
    auto flatten = [&](const ExprPtr& b) {
      T t = tr(b);
      std::string y = fresh();
      return mk::flat_map(to_m(t), y, mk::var(y));
    };
    if (by_name) return flatten(arg);
    note(arg, "lambda");
    return mk::lambda(arg->params, flatten(arg->kid(0)), arg->span);
  }

  T call(const ExprPtr& e) {
    std::size_t at = trace.size();
    note(e, "application");
    auto resolved = [&](const std::string& how) {
      if (trace_on_) trace[at].rule = "application " + how;
    };
    bool is_method = e->is(ExprKind::MethodCall);
    std::vector<ExprPtr> args(e->kids.begin() + 1, e->kids.end());
    std::vector<std::size_t> by_name;
    if (is_method) by_name = by_name_params(e->kid(0)->ty, e->name);
    auto is_by_name = [&](std::size_t i) { return std::find(by_name.begin(), by_name.end(), i) != by_name.end(); };
    auto fn_like = [&](std::size_t i) {
      return is_by_name(i) || args[i]->is(ExprKind::Lambda) || (args[i]->ty && args[i]->ty->is(TyKind::Fun));
    };

    T recv;
    if (is_method) recv = tr(e->kid(0));

    if (is_method && recv.kind == T::Chain) return chain_call(e, recv, args);

    std::vector<bool> eff(args.size()), monadic(args.size());
    bool any_eff = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!fn_like(i) || !has_await(args[i])) continue;
      eff[i] = any_eff = true;
      TyPtr rt = args[i]->is(ExprKind::Lambda) ? args[i]->kid(0)->ty : args[i]->ty;
      monadic[i] = rt && rt->is_monad(f_);
    }

    if (!any_eff) {
      for (std::size_t i = 0; i < args.size(); ++i)
        if (fn_like(i)) resolved("unchanged");
      std::vector<Operand> ops;
      if (is_method) ops.push_back({recv, false});
      ExprPtr fn;
      bool fn_operand = false;
      bool fn_monadic = false;
      if (!is_method) {
        const ExprPtr& f = e->kid(0);
        if (f->is(ExprKind::Lambda) && has_await(f)) {
          fn = shifted_lambda(f);
          fn_monadic = true;
        } else if (f->is(ExprKind::Var) || !effectful(f)) {
          fn = residual(f);
        } else {
          ops.push_back({tr(f), false});
          fn_operand = true;
        }
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (is_by_name(i) || args[i]->is(ExprKind::Lambda))
          ops.push_back({pure_t(residual(args[i])), true});
        else
          ops.push_back({tr(args[i]), false});
      }
      return sequence(std::move(ops), [&](std::vector<ExprPtr> xs) {
        if (is_method) {
          ExprPtr r = xs.front();
          xs.erase(xs.begin());
          return pure_t(mk::method(r, e->name, std::move(xs), e->span));
        }
        ExprPtr f = fn;
        if (fn_operand) {
          f = xs.front();
          xs.erase(xs.begin());
        }
        ExprPtr c = mk::apply(f, std::move(xs), e->span);
        return fn_monadic ? mon_t(c) : pure_t(c);
      });
    }

    Resolution res;
    if (is_method) {
      res = resolve(reg_, e->kid(0)->ty, e->name, eff, monadic, f_, e->span);
    } else {
      bool all_monadic = true;
      for (std::size_t i = 0; i < args.size(); ++i)
        if (eff[i] && !monadic[i]) all_monadic = false;
      if (!all_monadic) {
        std::string name = e->kid(0)->is(ExprKind::Var) ? e->kid(0)->name : "<function>";
        throw Error(ErrorKind::ShiftResolution, e->span,
                    "no shifted implementation of " + name + " for async[" + f_ + "]");
      }
      res.kind = ResolutionKind::Monadic;
    }
    resolved(resolution_name(res));

    std::vector<Operand> ops;
    if (is_method) ops.push_back({recv, false});
    ExprPtr fn;
    if (!is_method) fn = residual(e->kid(0));
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (res.kind == ResolutionKind::Monadic) {
        if (eff[i])
          ops.push_back({pure_t(monadic_fn(args[i], is_by_name(i))), true});
        else if (fn_like(i))
          ops.push_back({pure_t(residual(args[i])), true});
        else
          ops.push_back({tr(args[i]), false});
      } else if (fn_like(i)) {
        ops.push_back({pure_t(shifted_fn(args[i], is_by_name(i))), true});
      } else {
        ops.push_back({tr(args[i]), false});
      }
    }
    return sequence(std::move(ops), [&](std::vector<ExprPtr> xs) -> T {
      if (res.kind == ResolutionKind::Monadic) {
        if (is_method) {
          ExprPtr r = xs.front();
          xs.erase(xs.begin());
          return pure_t(mk::method(r, e->name, std::move(xs), e->span));
        }
        return pure_t(mk::apply(fn, std::move(xs), e->span));
      }
      ExprPtr r = xs.front();
      xs.erase(xs.begin());
      ExprPtr sc = mk::shift_call(tag_name(res.entry->tag), r, e->name, std::move(xs));
      if (res.entry->ret == ReturnKind::CallChain) return {T::Chain, sc};
      return mon_t(sc);
    });
  }

  T chain_call(const ExprPtr& e, const T& recv, const std::vector<ExprPtr>& args) {
    if (args.size() != 1)
      throw Error(ErrorKind::ShiftResolution, e->span, "unsupported call-chain operation " + e->name);
    const std::string& op = e->name;
    if (op != "map" && op != "foreach" && op != "filter" && op != "withFilter")
      throw Error(ErrorKind::ShiftResolution, e->span, "unsupported call-chain operation " + op);
    ExprPtr b = mk::chain_op(recv.e, op == "withFilter" ? "filter" : op, shifted_fn(args[0], false));
    if (op == "filter" || op == "withFilter") return {T::Chain, b};
    return mon_t(mk::finish_chain(b));
  }
};

std::set<std::string> names_of(const Program& p) {
  std::set<std::string> out;
  for (const auto& d : p.defs) {
    out.insert(d.name);
    for (const auto& q : d.params) out.insert(q.name);
    collect_names(d.body, out);
  }
  collect_names(p.main, out);
  return out;
}

int count_if(const ExprPtr& e, ExprKind stop, const std::function<bool(const Expr&)>& pred) {
  if (!e) return 0;
  if (e->kind == stop) return 0;
  int n = pred(*e) ? 1 : 0;
  for (const auto& k : e->kids) n += count_if(k, stop, pred);
  return n;
}

}  // namespace

CpsResult transform(const ExprPtr& body, const std::string& f, const TransformOptions& opts, const ShiftRegistry& reg) {
  std::set<std::string> taken;
  collect_names(body, taken);
  std::set<std::string> assigned;
  collect_assigned(body, assigned);
  Transformer t(opts, reg, std::move(taken), std::move(assigned));
  T r = t.body(f, body);
  CpsResult out;
  out.trivial = r.pure() && opts.optimize;
  out.transformed = t.to_m(r);
  if (!opts.optimize) out.trivial = out.transformed->is(ExprKind::Pure);
  out.trace = std::move(t.trace);
  return out;
}

Program transform_program(const Program& typed, const TransformOptions& opts, const ShiftRegistry& reg,
                          std::vector<RuleApp>* trace) {
  std::set<std::string> assigned;
  for (const auto& d : typed.defs) collect_assigned(d.body, assigned);
  collect_assigned(typed.main, assigned);
  Transformer t(opts, reg, names_of(typed), std::move(assigned));
  Program out;
  for (const auto& d : typed.defs) {
    FunDef nd = d;
    nd.body = t.residual(d.body);
    out.defs.push_back(std::move(nd));
  }
  out.main = t.residual(typed.main);
  if (trace) *trace = std::move(t.trace);
  return out;
}

int count_awaits(const ExprPtr& body) {
  return count_if(body, ExprKind::Async, [](const Expr& e) { return e.is(ExprKind::Await); });
}

int count_binds(const ExprPtr& transformed) {
  return count_if(transformed, ExprKind::CpsBlock, [](const Expr& e) {
    return e.is(ExprKind::FlatMap) || e.is(ExprKind::FlatMapTry) || e.is(ExprKind::Map);
  });
}

std::string format_trace(const std::vector<RuleApp>& trace) {
  std::string out;
  for (const auto& r : trace)
    out += std::to_string(r.span.line) + ":" + std::to_string(r.span.col) + " " + r.rule + "\n";
  return out;
}

}  // namespace cpsforge
