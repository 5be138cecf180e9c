#include "cpsforge/interp.hpp"

#include <algorithm>

namespace cpsforge {

namespace {

/// Unwinds an `async[option]` body on an awaited None.
struct ShortCircuit {
  int ctx;
};
/// A nondet path with no continuation (await of an empty choice).
struct DeadPath {
  int ctx;
};

Value lit_value(const Literal& l) {
  return std::visit(
      [](const auto& x) -> Value {
        using L = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<L, UnitLit>) return Value(UnitV{});
        else return Value(x);
      },
      l);
}

[[noreturn]] void raise(const std::string& msg) { throw ThrowSignal{msg}; }

class Interp {
 public:
  Interp(const Program& p, const InterpOptions& opts)
      : p_(p), reg_storage_(opts.registry ? ShiftRegistry() : ShiftRegistry::builtin()),
        reg_(opts.registry ? *opts.registry : reg_storage_), max_paths_(opts.max_paths) {
    for (const auto& d : p_.defs) defs_[d.name] = &d;
    k.call = [this](const Value& fn, std::vector<Value> args) { return call_value(fn, std::move(args)); };
  }

  Kernel k;

  Observable run_main() {
    Value v = guard_top([&] { return ev(p_.main, nullptr, -1); });
    if (const auto* m = v.get<MValPtr>()) return guard_top([&] { return k.run(*m); });
    return k.observe_plain(v);
  }

  Observable run_expr(const ExprPtr& e, MonadId f) {
    MValPtr m = guard_top([&] { return evm(e, nullptr, f); });
    return guard_top([&] { return k.run(m); });
  }

 private:
  const Program& p_;
  ShiftRegistry reg_storage_;
  const ShiftRegistry& reg_;
  std::size_t max_paths_;
  std::map<std::string, const FunDef*> defs_;
  std::map<std::string, Value> def_closures_;

  struct Ctx {
    MonadId m;
    int id;
    // nondet replay: (choice, count) per await in path order
    std::vector<std::pair<int, int>> stack;
    std::size_t depth = 0;
    ResCtx* res = nullptr;
    // nested nondet blocks already enumerated in an earlier replay, keyed by
    // (node, choice prefix, occurrence in this run)
    std::map<std::tuple<int, std::vector<std::pair<int, int>>, int>, MValPtr>* memo = nullptr;
    std::map<int, int> seen;
  };
  std::vector<Ctx> ctx_;
  int next_ctx_ = 0;

  struct CtxGuard {
    std::vector<Ctx>& s;
    ~CtxGuard() { s.pop_back(); }
  };

  template <class F>
  auto guard_top(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ThrowSignal& t) {
      throw Error(ErrorKind::Runtime, {}, "uncaught throw: " + t.msg);
    } catch (const ShortCircuit&) {
      kernel_fault("await escaped its async block");
    } catch (const DeadPath&) {
      kernel_fault("await escaped its async block");
    }
  }

  static int fid(MonadId m) { return static_cast<int>(m); }
  static MonadId mid(int f) {
    if (f < 0) kernel_fault("monadic core node outside a cps block");
    return static_cast<MonadId>(f);
  }

  EnvPtr bind(const EnvPtr& env, const std::string& name, Value v) {
    if (name == "_") return env;
    return env_bind(env, name, std::move(v));
  }

  // --------------------------------------------------------------------
  // Calls

  Value call_value(const Value& fn, std::vector<Value> args) {
    const ClosurePtr& c = fn.as_closure();
    if (c->native) return c->native(std::move(args));
    if (args.size() != c->params.size())
      kernel_fault("arity mismatch: expected " + std::to_string(c->params.size()) + ", got " +
                   std::to_string(args.size()));
    EnvPtr env = c->env;
    for (std::size_t i = 0; i < args.size(); ++i) env = bind(env, c->params[i], std::move(args[i]));
    int f = -1;
    if (!c->monad.empty()) f = fid(monad_id_or_throw(c->monad));
    return ev(c->body, env, f);
  }

  Value def_closure(const std::string& name) {
    auto it = def_closures_.find(name);
    if (it != def_closures_.end()) return it->second;
    const FunDef* d = defs_.at(name);
    auto c = std::make_shared<Closure>();
    for (const auto& p : d->params) c->params.push_back(p.name);
    c->body = d->body;
    c->arity = static_cast<int>(d->params.size());
    Value v{ClosurePtr(c)};
    def_closures_[name] = v;
    return v;
  }

  Value lookup(const std::string& name, const EnvPtr& env, Span span) {
    if (const Env* b = env_find(env, name)) {
      if (b->cell >= 0) return k.world.cells.at(b->cell);
      return b->value;
    }
    if (defs_.contains(name)) return def_closure(name);
    throw Error(ErrorKind::Runtime, span, "unbound identifier '" + name + "'");
  }

  // --------------------------------------------------------------------
  // Evaluation

  MValPtr evm(const ExprPtr& e, const EnvPtr& env, MonadId f) {
    return k.guarded(f, [&] { return Kernel::expect_monad(ev(e, env, fid(f)), f); });
  }

  Value ev(const ExprPtr& e, const EnvPtr& env, int f) {
    switch (e->kind) {
      case ExprKind::Lit: return lit_value(e->lit);
      case ExprKind::Var: return lookup(e->name, env, e->span);
      case ExprKind::Block: {
        Value v;
        for (const auto& s : e->kids) v = ev(s, env, f);
        return v;
      }
      case ExprKind::ValDef: {
        Value v = ev(e->kid(0), env, f);
        return ev(e->kid(1), bind(env, e->name, std::move(v)), f);
      }
      case ExprKind::VarDef: {
        Value v = ev(e->kid(0), env, f);
        int cell = static_cast<int>(k.world.cells.size());
        k.world.cells.push_back(std::move(v));
        return ev(e->kid(1), env_bind_cell(env, e->name, cell), f);
      }
      case ExprKind::Assign: {
        Value v = ev(e->kid(0), env, f);
        const Env* b = env_find(env, e->name);
        if (!b || b->cell < 0) throw Error(ErrorKind::Runtime, e->span, "assignment to non-var '" + e->name + "'");
        k.world.cells.at(b->cell) = std::move(v);
        return Value(UnitV{});
      }
      case ExprKind::If:
        return ev(e->kid(ev(e->kid(0), env, f).as_bool() ? 1 : 2), env, f);
      case ExprKind::While:
        while (ev(e->kid(0), env, f).as_bool()) ev(e->kid(1), env, f);
        return Value(UnitV{});
      case ExprKind::Match: return match(e, env, f);
      case ExprKind::Try: return try_(e, env, f);
      case ExprKind::Throw: raise(ev(e->kid(0), env, f).as_str());
      case ExprKind::Lambda: {
        auto c = std::make_shared<Closure>();
        for (const auto& p : e->params) c->params.push_back(p.name);
        c->body = e->kid(0);
        c->env = env;
        c->arity = static_cast<int>(e->params.size());
        if (f >= 0) c->monad = monad_name(mid(f));
        return Value(ClosurePtr(c));
      }
      case ExprKind::Apply: return apply(e, env, f);
      case ExprKind::MethodCall: return method(e, env, f);
      case ExprKind::Await: return await_oracle(e, env, f);
      case ExprKind::Async: return async_oracle(e, env);

      // --- monadic core ---
      case ExprKind::Pure: {
        MonadId m = mid(f);
        return Value(k.guarded(m, [&] { return k.pure(m, ev(e->kid(0), env, f)); }));
      }
      case ExprKind::FlatMap: {
        MonadId m = mid(f);
        MValPtr fa = evm(e->kid(0), env, m);
        ExprPtr body = e->kid(1);
        std::string x = e->name;
        return Value(k.flat_map(fa, [this, body, x, env, m](const Value& v) { return evm(body, bind(env, x, v), m); }));
      }
      case ExprKind::Map: {
        MonadId m = mid(f);
        MValPtr fa = evm(e->kid(0), env, m);
        ExprPtr body = e->kid(1);
        std::string x = e->name;
        return Value(k.flat_map(fa, [this, body, x, env, m](const Value& v) {
          return k.guarded(m, [&] { return k.pure(m, ev(body, bind(env, x, v), fid(m))); });
        }));
      }
      case ExprKind::FlatMapTry: {
        MonadId m = mid(f);
        MValPtr fa = evm(e->kid(0), env, m);
        ExprPtr ok = e->kid(1), bad = e->kid(2);
        std::string s = e->name, err = e->name2;
        return Value(k.flat_map_try(fa, [this, ok, bad, s, err, env, m](const Outcome& o) {
          if (o.ok) return evm(ok, bind(env, s, o.v), m);
          return evm(bad, bind(env, err, Value(o.err)), m);
        }));
      }
      case ExprKind::MonadError: return Value(k.error(mid(f), ev(e->kid(0), env, f).as_str()));
      case ExprKind::AdoptAwait: return Value(k.adopt_await(e->ref, ev(e->kid(0), env, f).as_m()));
      case ExprKind::Convert:
        return Value(k.convert(monad_id_or_throw(e->name), monad_id_or_throw(e->name2), ev(e->kid(0), env, f).as_m()));
      case ExprKind::WhileHelper: {
        MonadId m = mid(f);
        ExprPtr c = e->kid(0), b = e->kid(1);
        return Value(k.while_helper(m, [this, c, env, m] { return evm(c, env, m); },
                                    [this, b, env, m] { return evm(b, env, m); }));
      }
      case ExprKind::ShiftCall: {
        MonadId m = mid(f);
        Value recv = ev(e->kid(0), env, f);
        std::vector<Value> args;
        for (std::size_t i = 1; i < e->kids.size(); ++i) args.push_back(ev(e->kid(i), env, f));
        auto tag = tag_from_name(e->name2);
        if (!tag) kernel_fault("unknown shift tag " + e->name2);
        const ShiftEntry* entry = reg_.find(receiver_kind(recv), e->name, *tag, m);
        if (!entry) kernel_fault("no shift entry " + receiver_kind(recv) + "." + e->name + " [" + e->name2 + "]");
        return shifted_call(*entry, k, m, recv, args);
      }
      case ExprKind::ChainOp: {
        Value b = ev(e->kid(0), env, f);
        return chain_append(b, e->name, ev(e->kid(1), env, f));
      }
      case ExprKind::FinishChain: return Value(chain_finish(k, mid(f), ev(e->kid(0), env, f)));
      case ExprKind::CpsBlock: return cps_block(e, env);
    }
    kernel_fault("unhandled node");
  }

  Value match(const ExprPtr& e, const EnvPtr& env, int f) {
    Value s = ev(e->kid(0), env, f);
    for (std::size_t i = 0; i < e->pats.size(); ++i) {
      const Pattern& p = e->pats[i];
      switch (p.kind) {
        case Pattern::Kind::Wild: return ev(e->kid(i + 1), env, f);
        case Pattern::Kind::Bind: return ev(e->kid(i + 1), bind(env, p.name, s), f);
        case Pattern::Kind::Lit:
          if (value_eq(s, lit_value(p.lit))) return ev(e->kid(i + 1), env, f);
          break;
      }
    }
    raise("match error: " + show_value(s));
  }

  // Finally runs only after normal completion of the body or the handler.
  Value try_(const ExprPtr& e, const EnvPtr& env, int f) {
    bool has_h = e->kids.size() > 1 && e->kid(1);
    bool has_f = e->kids.size() > 2 && e->kid(2);
    Value v;
    std::optional<std::string> failed;
    try {
      v = ev(e->kid(0), env, f);
    } catch (const ThrowSignal& t) {
      failed = t.msg;
    }
    if (failed) {
      if (!has_h) raise(*failed);
      v = ev(e->kid(1), bind(env, e->name, Value(*failed)), f);
    }
    if (has_f) ev(e->kid(2), env, f);
    return v;
  }

  // --------------------------------------------------------------------
  // Oracle: direct-style async

  Value async_oracle(const ExprPtr& e, const EnvPtr& env) {
    MonadId m = monad_id_or_throw(e->name);
    ExprPtr body = e->kid(0);
    int id = next_ctx_++;
    auto enter = [&](ResCtx* res = nullptr) {
      ctx_.push_back(Ctx{m, id, {}, 0, res, nullptr, {}});
      return CtxGuard{ctx_};
    };
    switch (m) {
      case MonadId::Ident: {
        auto g = enter();
        return Value(k.pure(m, ev(body, env, -1)));
      }
      case MonadId::Option: {
        auto g = enter();
        try {
          return Value(k.option_of(true, ev(body, env, -1)));
        } catch (const ShortCircuit& s) {
          if (s.ctx != id) throw;
          return Value(k.option_of(false, Value(UnitV{})));
        }
      }
      case MonadId::Result:
      case MonadId::Eventual: {
        auto g = enter();
        try {
          return Value(k.pure(m, ev(body, env, -1)));
        } catch (const ThrowSignal& t) {
          return Value(k.error(m, t.msg));
        }
      }
      case MonadId::Resource:
        return Value(k.resource_of([this, body, env, m, id](ResCtx& rc) -> Outcome {
          ctx_.push_back(Ctx{m, id, {}, 0, &rc, nullptr, {}});
          CtxGuard g{ctx_};
          try {
            return Outcome{true, ev(body, env, -1), {}};
          } catch (const ThrowSignal& t) {
            return Outcome{false, {}, t.msg};
          }
        }));
      case MonadId::Nondet: {
        Ctx* outer = ctx_.empty() || ctx_.back().m != MonadId::Nondet ? nullptr : &ctx_.back();
        if (!outer || !outer->memo) return Value(enumerate(body, env, id));
        std::vector<std::pair<int, int>> prefix(outer->stack.begin(),
                                                outer->stack.begin() + static_cast<long>(outer->depth));
        auto key = std::make_tuple(e->id, std::move(prefix), outer->seen[e->id]++);
        auto* memo = outer->memo;
        auto it = memo->find(key);
        if (it != memo->end()) return Value(it->second);
        MValPtr r = enumerate(body, env, id);
        (*memo)[std::move(key)] = r;
        return Value(r);
      }
    }
    kernel_fault("unknown monad");
  }

  /// Brute-force path enumeration by replay: every run follows the recorded
  /// choice prefix and extends it with first choices.
  MValPtr enumerate(const ExprPtr& body, const EnvPtr& env, int id) {
    World w0 = k.world;
    std::vector<Branch> out;
    std::vector<std::pair<int, int>> stack;
    std::size_t runs = 0;
    std::map<std::tuple<int, std::vector<std::pair<int, int>>, int>, MValPtr> memo;
    while (true) {
      if (++runs > max_paths_)
        throw Error(ErrorKind::PathExplosion, body->span,
                    "nondet enumeration exceeded " + std::to_string(max_paths_) + " paths");
      k.world = w0;
      ctx_.push_back(Ctx{MonadId::Nondet, id, stack, 0, nullptr, &memo, {}});
      {
        CtxGuard g{ctx_};
        try {
          Value v = ev(body, env, -1);
          out.push_back(Branch{v, std::make_shared<const World>(k.world)});
        } catch (const DeadPath& d) {
          if (d.ctx != id) throw;
        }
        stack = ctx_.back().stack;
      }
      while (!stack.empty() && stack.back().first + 1 >= stack.back().second) stack.pop_back();
      if (stack.empty()) break;
      stack.back().first++;
    }
    k.world = w0;
    auto r = std::make_shared<MVal>();
    r->m = MonadId::Nondet;
    r->branches = std::move(out);
    return r;
  }

  Value await_oracle(const ExprPtr& e, const EnvPtr& env, int f) {
    if (ctx_.empty()) throw Error(ErrorKind::UnsupportedPosition, e->span, "await outside async");
    MValPtr mv = ev(e->kid(0), env, f).as_m();
    Ctx& c = ctx_.back();
    if (mv->m != c.m) mv = k.convert(mv->m, c.m, mv);
    k.world.adopt_log.push_back(e->id);
    switch (c.m) {
      case MonadId::Ident: return mv->v;
      case MonadId::Option:
        if (!mv->ok) throw ShortCircuit{c.id};
        return mv->v;
      case MonadId::Result:
        if (!mv->ok) raise(mv->err);
        return mv->v;
      case MonadId::Eventual: {
        if (!k.sched.drive_until(mv->cell))
          throw Error(ErrorKind::Deadlock, e->span, "await on an eventual value that never completes");
        const Outcome* o = k.sched.result(mv->cell);
        if (!o->ok) raise(o->err);
        return o->v;
      }
      case MonadId::Resource: {
        Outcome o = k.run_plan(mv, *c.res);
        if (!o.ok) raise(o.err);
        return o.v;
      }
      case MonadId::Nondet: {
        int n = static_cast<int>(mv->branches.size());
        int i;
        if (c.depth < c.stack.size()) {
          i = c.stack[c.depth].first;
        } else {
          if (n == 0) throw DeadPath{c.id};
          c.stack.push_back({0, n});
          i = 0;
        }
        c.depth++;
        const Branch& b = mv->branches.at(i);
        if (b.world) k.world = *b.world;
        return b.v;
      }
    }
    kernel_fault("unknown monad");
  }

  // --------------------------------------------------------------------
  // Eval: cps blocks

  Value cps_block(const ExprPtr& e, const EnvPtr& env) {
    MonadId g = monad_id_or_throw(e->name);
    ExprPtr body = e->kid(0);
    if (g == MonadId::Resource)
      return Value(k.resource_of([this, body, env, g](ResCtx& rc) { return k.run_plan(evm(body, env, g), rc); }));
    if (g == MonadId::Nondet) {
      World w0 = k.world;
      MValPtr mv = evm(body, env, g);
      auto r = std::make_shared<MVal>(*mv);
      for (auto& b : r->branches)
        if (!b.world) b.world = std::make_shared<const World>(k.world);
      k.world = std::move(w0);
      return Value(MValPtr(r));
    }
    return Value(evm(body, env, g));
  }

  // --------------------------------------------------------------------
  // Builtins

  std::vector<Value> eval_args(const ExprPtr& e, const EnvPtr& env, int f) {
    std::vector<Value> out;
    for (std::size_t i = 1; i < e->kids.size(); ++i) out.push_back(ev(e->kid(i), env, f));
    return out;
  }

  Value apply(const ExprPtr& e, const EnvPtr& env, int f) {
    const ExprPtr& fn = e->kid(0);
    if (fn->is(ExprKind::Var) && !env_find(env, fn->name) && !defs_.contains(fn->name))
      return builtin(fn->name, e, eval_args(e, env, f));
    Value fv = ev(fn, env, f);
    return call_value(fv, eval_args(e, env, f));
  }

  Handle& handle(const Value& v) {
    const auto* h = v.get<FileV>();
    if (!h) kernel_fault("expected File, got " + show_value(v));
    return k.world.handles.at(h->id);
  }

  Value builtin(const std::string& n, const ExprPtr& e, std::vector<Value> a) {
    auto need = [&](std::size_t c) {
      if (a.size() != c) kernel_fault("'" + n + "' expects " + std::to_string(c) + " arguments");
    };
    if (n.rfind("pure_", 0) == 0) {
      need(1);
      return Value(k.pure(monad_id_or_throw(n.substr(5)), a[0]));
    }
    if (n == "some") return Value(k.option_of(true, a.at(0)));
    if (n == "none_of") return Value(k.option_of(false, Value(UnitV{})));
    if (n == "ok") return Value(k.result_of(true, a.at(0), {}));
    if (n == "err_of") return Value(k.result_of(false, Value(UnitV{}), a.at(1).as_str()));
    if (n == "choose") return Value(k.nondet_of(*a.at(0).as_list()));
    if (n == "delay") {
      Value v = a.at(0);
      return Value(k.eventual_task([v] { return Outcome{true, v, {}}; }));
    }
    if (n == "fail_eventual") {
      std::string msg = a.at(1).as_str();
      return Value(k.eventual_task([msg] { return Outcome{false, {}, msg}; }));
    }
    if (n == "never_of") return Value(k.eventual_never());
    if (n == "spawn") {
      std::string site = a.at(0).as_str();
      Value v = a.at(1);
      return Value(k.eventual_task([this, site, v] {
        k.world.counters[site]++;
        return Outcome{true, v, {}};
      }));
    }
    if (n == "io") {
      std::string site = a.at(0).as_str();
      Value v = a.at(1);
      return Value(k.resource_of([this, site, v](ResCtx&) {
        k.world.counters[site]++;
        return Outcome{true, v, {}};
      }));
    }
    if (n == "acquire") {
      std::string name = a.at(0).as_str();
      Value v = a.at(1);
      return Value(k.resource_of([name, v](ResCtx& rc) {
        rc.acquired.push_back(name);
        return Outcome{true, v, {}};
      }));
    }
    if (n == "open") {
      std::string name = a.at(0).as_str();
      return Value(k.resource_of([this, name](ResCtx& rc) {
        k.world.files.try_emplace(name);
        int id = static_cast<int>(k.world.handles.size());
        k.world.handles.push_back(Handle{name, 0});
        rc.acquired.push_back(name);
        return Outcome{true, Value(FileV{id}), {}};
      }));
    }
    if (n == "read") {
      int id = a.at(0).get<FileV>() ? a[0].get<FileV>()->id : -1;
      std::int64_t want = a.at(1).as_int();
      return Value(k.resource_of([this, id, want](ResCtx&) {
        Handle& h = k.world.handles.at(id);
        std::int64_t size = k.world.files[h.name].size;
        std::int64_t got = std::max<std::int64_t>(0, std::min(want, size - h.pos));
        h.pos += got;
        return Outcome{true, Value(BufferV{got}), {}};
      }));
    }
    if (n == "write") {
      int id = a.at(0).get<FileV>() ? a[0].get<FileV>()->id : -1;
      std::int64_t size = a.at(1).get<BufferV>() ? a[1].get<BufferV>()->size : 0;
      return Value(k.resource_of([this, id, size](ResCtx&) {
        Handle& h = k.world.handles.at(id);
        k.world.files[h.name].size += size;
        h.pos += size;
        return Outcome{true, Value(UnitV{}), {}};
      }));
    }
    if (n == "mkfile") {
      k.world.files[a.at(0).as_str()] = FileData{a.at(1).as_int()};
      return Value(UnitV{});
    }
    if (n == "tick") {
      k.world.counters[a.at(0).as_str()]++;
      return Value(UnitV{});
    }
    if (n == "counter") return Value(k.world.counters[a.at(0).as_str()]);
    if (n == "range") return Value(RangeV{a.at(0).as_int(), a.at(1).as_int()});
    if (n == "cache") {
      int id = static_cast<int>(k.world.caches.size());
      k.world.caches.emplace_back();
      return Value(CacheV{id});
    }
    if (n == "box") return Value(BoxV{std::make_shared<const Value>(a.at(0))});
    if (n == "not") return Value(!a.at(0).as_bool());
    if (n == "memoize") return Value(k.memoize(a.at(0).as_m()));
    if (n == "discard") {
      k.world.discards.push_back(show_value(a.at(0)));
      return Value(UnitV{});
    }
    if (n == "nil_of") return make_list({});
    if (n == "list") return make_list(std::move(a));
    throw Error(ErrorKind::Runtime, e->span, "unknown function '" + n + "'");
  }

  // --------------------------------------------------------------------
  // Native methods

  Value method(const ExprPtr& e, const EnvPtr& env, int f) {
    Value r = ev(e->kid(0), env, f);
    const std::string& m = e->name;
    std::string kind = receiver_kind(r);
    std::size_t nargs = e->kids.size() - 1;
    // by-name positions are evaluated on demand
    auto lazy = [&](std::size_t i) { return [this, e, env, f, i] { return ev(e->kid(i + 1), env, f); }; };
    bool by_name1 = (kind == "Cache" && (m == "getOrUpdate" || m == "getOrElse")) || (kind == "List" && m == "getOrElse");
    bool by_name0 = kind == "Option" && m == "getOrElse";
    std::vector<Value> a;
    for (std::size_t i = 0; i < nargs; ++i) {
      if ((i == 1 && by_name1) || (i == 0 && by_name0)) break;
      a.push_back(ev(e->kid(i + 1), env, f));
    }
    if (m == "eq") return Value(value_eq(r, a.at(0)));
    if (m == "ne") return Value(!value_eq(r, a.at(0)));
    if (kind == "Int") return int_method(r.as_int(), m, a);
    if (kind == "Bool") {
      bool b = r.as_bool();
      if (m == "and") return Value(b && a.at(0).as_bool());
      if (m == "or") return Value(b || a.at(0).as_bool());
      if (m == "show") return Value(std::string(b ? "true" : "false"));
    }
    if (kind == "Str") {
      if (m == "plus") return Value(r.as_str() + a.at(0).as_str());
      if (m == "size") return Value(static_cast<std::int64_t>(r.as_str().size()));
    }
    if (kind == "List") {
      if (m == "getOrElse") {
        const auto& xs = *r.as_list();
        std::int64_t i = a.at(0).as_int();
        if (i >= 0 && i < static_cast<std::int64_t>(xs.size())) return xs[i];
        return lazy(1)();
      }
      return list_method(r.as_list(), m, a);
    }
    if (kind == "Option") {
      const auto& o = *r.get<OptionV>();
      if (m == "isDefined") return Value(o.inner != nullptr);
      if (m == "get") {
        if (!o.inner) raise("get of None");
        return *o.inner;
      }
      if (m == "getOrElse") return o.inner ? *o.inner : lazy(0)();
    }
    if (kind == "WithFilter") return with_filter_method(*r.get<WithFilterV>(), m, a);
    if (kind == "Range") {
      const auto& rg = *r.get<RangeV>();
      std::vector<Value> xs;
      for (std::int64_t i = rg.lo; i < rg.hi; ++i) xs.push_back(Value(i));
      if (m == "toList") return make_list(std::move(xs));
      if (m == "size") return Value(std::max<std::int64_t>(0, rg.hi - rg.lo));
      return list_method(make_list(std::move(xs)).as_list(), m, a);
    }
    if (kind == "Cache") {
      int id = r.get<CacheV>()->id;
      auto& c = k.world.caches.at(id);
      if (m == "get") {
        auto it = c.find(a.at(0).as_int());
        if (it == c.end()) return Value(OptionV{});
        return Value(OptionV{std::make_shared<const Value>(Value(it->second))});
      }
      if (m == "put") {
        c[a.at(0).as_int()] = a.at(1).as_int();
        return Value(UnitV{});
      }
      if (m == "size") return Value(static_cast<std::int64_t>(c.size()));
      if (m == "getOrUpdate" || m == "getOrElse") {
        std::int64_t key = a.at(0).as_int();
        if (auto it = c.find(key); it != c.end()) return Value(it->second);
        Value v = lazy(1)();
        if (m == "getOrUpdate") k.world.caches.at(id)[key] = v.as_int();
        return v;
      }
    }
    if (kind == "Box") {
      const Value& v = *r.get<BoxV>()->inner;
      if (m == "get") return v;
      if (m == "map") return Value(BoxV{std::make_shared<const Value>(call_value(a.at(0), {v}))});
      if (m == "apply") return call_value(a.at(0), {v});
    }
    if (kind == "Buffer" && m == "position") return Value(r.get<BufferV>()->size);
    if (kind == "File" && m == "size") return Value(k.world.files[handle(r).name].size);
    throw Error(ErrorKind::Runtime, e->span, "no method " + kind + "." + m);
  }

  Value int_method(std::int64_t x, const std::string& m, const std::vector<Value>& a) {
    auto y = [&] { return a.at(0).as_int(); };
    // wrap-around arithmetic, as unsigned
    auto wrap = [](std::uint64_t v) { return Value(static_cast<std::int64_t>(v)); };
    if (m == "plus") return wrap(static_cast<std::uint64_t>(x) + static_cast<std::uint64_t>(y()));
    if (m == "minus") return wrap(static_cast<std::uint64_t>(x) - static_cast<std::uint64_t>(y()));
    if (m == "times") return wrap(static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y()));
    if (m == "div" || m == "mod") {
      std::int64_t d = y();
      if (d == 0) raise("division by zero");
      if (d == -1) return m == "div" ? wrap(0 - static_cast<std::uint64_t>(x)) : Value(std::int64_t{0});
      return Value(m == "div" ? x / d : x % d);
    }
    if (m == "lt") return Value(x < y());
    if (m == "le") return Value(x <= y());
    if (m == "gt") return Value(x > y());
    if (m == "ge") return Value(x >= y());
    if (m == "abs") return x < 0 ? wrap(0 - static_cast<std::uint64_t>(x)) : Value(x);
    if (m == "negate") return wrap(0 - static_cast<std::uint64_t>(x));
    if (m == "show") return Value(std::to_string(x));
    kernel_fault("no method Int." + m);
  }

  Value list_method(const ValueList& xs, const std::string& m, const std::vector<Value>& a) {
    if (m == "size") return Value(static_cast<std::int64_t>(xs->size()));
    if (m == "isEmpty") return Value(xs->empty());
    if (m == "get") {
      std::int64_t i = a.at(0).as_int();
      if (i < 0 || i >= static_cast<std::int64_t>(xs->size())) raise("index out of range");
      return (*xs)[i];
    }
    if (m == "appended") {
      auto v = *xs;
      v.push_back(a.at(0));
      return make_list(std::move(v));
    }
    if (m == "concat") {
      auto v = *xs;
      for (const auto& x : *a.at(0).as_list()) v.push_back(x);
      return make_list(std::move(v));
    }
    if (m == "contains") {
      for (const auto& x : *xs)
        if (value_eq(x, a.at(0))) return Value(true);
      return Value(false);
    }
    if (m == "map") {
      std::vector<Value> out;
      for (const auto& x : *xs) {
        k.world.visits++;
        out.push_back(call_value(a.at(0), {x}));
      }
      return make_list(std::move(out));
    }
    if (m == "filter") {
      std::vector<Value> out;
      for (const auto& x : *xs) {
        k.world.visits++;
        if (call_value(a.at(0), {x}).as_bool()) out.push_back(x);
      }
      return make_list(std::move(out));
    }
    if (m == "exists") {
      for (const auto& x : *xs) {
        k.world.visits++;
        if (call_value(a.at(0), {x}).as_bool()) return Value(true);
      }
      return Value(false);
    }
    if (m == "foreach") {
      for (const auto& x : *xs) {
        k.world.visits++;
        call_value(a.at(0), {x});
      }
      return Value(UnitV{});
    }
    if (m == "fold") {
      Value acc = a.at(0);
      for (const auto& x : *xs) {
        k.world.visits++;
        acc = call_value(a.at(1), {acc, x});
      }
      return acc;
    }
    if (m == "withFilter") return Value(WithFilterV{xs, {a.at(0).as_closure()}});
    kernel_fault("no method List." + m);
  }

  Value with_filter_method(const WithFilterV& w, const std::string& m, const std::vector<Value>& a) {
    if (m == "filter" || m == "withFilter") {
      WithFilterV out = w;
      out.preds.push_back(a.at(0).as_closure());
      return Value(out);
    }
    std::vector<Value> out;
    for (const auto& x : *w.items) {
      k.world.visits++;
      bool keep = true;
      for (const auto& p : w.preds)
        if (!call_value(Value(p), {x}).as_bool()) {
          keep = false;
          break;
        }
      if (!keep) continue;
      Value y = call_value(a.at(0), {x});
      if (m == "map") out.push_back(y);
    }
    if (m == "map") return make_list(std::move(out));
    if (m == "foreach") return Value(UnitV{});
    kernel_fault("no method WithFilter." + m);
  }
};

}  // namespace

Observable oracle(const Program& typed, const InterpOptions& opts) {
  Interp in(typed, opts);
  return in.run_main();
}

Observable eval(const Program& transformed, const InterpOptions& opts) {
  Interp in(transformed, opts);
  return in.run_main();
}

Observable eval_expr(const ExprPtr& e, const std::string& f, const InterpOptions& opts) {
  Program p;
  p.main = e;
  Interp in(p, opts);
  return in.run_expr(e, monad_id_or_throw(f));
}

}  // namespace cpsforge
